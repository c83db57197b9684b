#include "cortigraph/prune.hpp"

#include <algorithm>
#include <cmath>

#include "cortigraph/geometry.hpp"
#include "cortigraph/parallel.hpp"

namespace cg {

namespace {

Vec3 voxel_center(const Voxel& v, const Spacing& s) {
  return {(v.x + 0.5) * s[0], (v.y + 0.5) * s[1], (v.z + 0.5) * s[2]};
}

// Uniform grid over triangle bounding boxes. Queries walk the cells covered
// by a padded segment AABB and report candidate triangle ids (with
// duplicates; callers dedupe with a stamp array).
class TriGrid {
 public:
  TriGrid(const TriangleMesh& mesh) : mesh_(mesh) {
    std::size_t nt = mesh.n_triangles();
    tri_lo_.resize(nt);
    tri_hi_.resize(nt);
    lo_ = {1e300, 1e300, 1e300};
    hi_ = {-1e300, -1e300, -1e300};
    for (std::size_t t = 0; t < nt; ++t) {
      const auto& tri = mesh.triangles[t];
      Vec3 a = from_array(mesh.vertices[tri[0]]);
      Vec3 b = from_array(mesh.vertices[tri[1]]);
      Vec3 c = from_array(mesh.vertices[tri[2]]);
      tri_lo_[t] = {std::min({a.x, b.x, c.x}), std::min({a.y, b.y, c.y}),
                    std::min({a.z, b.z, c.z})};
      tri_hi_[t] = {std::max({a.x, b.x, c.x}), std::max({a.y, b.y, c.y}),
                    std::max({a.z, b.z, c.z})};
      lo_ = {std::min(lo_.x, tri_lo_[t].x), std::min(lo_.y, tri_lo_[t].y),
             std::min(lo_.z, tri_lo_[t].z)};
      hi_ = {std::max(hi_.x, tri_hi_[t].x), std::max(hi_.y, tri_hi_[t].y),
             std::max(hi_.z, tri_hi_[t].z)};
    }
    Vec3 ext = hi_ - lo_;
    double max_ext = std::max({ext.x, ext.y, ext.z, 1e-9});
    double vol = std::max(ext.x, 1e-9) * std::max(ext.y, 1e-9) * std::max(ext.z, 1e-9);
    double target = static_cast<double>(std::min<std::size_t>(nt, 1u << 20));
    cell_ = std::max(std::cbrt(vol / std::max(target, 1.0)), max_ext / 256.0);
    for (;;) {
      nx_ = axis_cells(ext.x);
      ny_ = axis_cells(ext.y);
      nz_ = axis_cells(ext.z);
      if (static_cast<std::size_t>(nx_) * ny_ * nz_ <= (1u << 23)) break;
      cell_ *= 1.3;
    }
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(nx_) * ny_ * nz_ + 1, 0);
    for (std::size_t t = 0; t < nt; ++t)
      for_each_cell(tri_lo_[t], tri_hi_[t],
                    [&](std::size_t cidx) { ++counts[cidx + 1]; });
    for (std::size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
    cell_offsets_ = counts;
    ids_.resize(cell_offsets_.back());
    std::vector<std::uint32_t> cursor(cell_offsets_.begin(), cell_offsets_.end() - 1);
    for (std::size_t t = 0; t < nt; ++t)
      for_each_cell(tri_lo_[t], tri_hi_[t], [&](std::size_t cidx) {
        ids_[cursor[cidx]++] = static_cast<std::uint32_t>(t);
      });
  }

  template <class Fn>
  void candidates(const Vec3& seg_lo, const Vec3& seg_hi, Fn&& fn) const {
    double pad = 1e-6 * cell_;
    Vec3 qlo = {seg_lo.x - pad, seg_lo.y - pad, seg_lo.z - pad};
    Vec3 qhi = {seg_hi.x + pad, seg_hi.y + pad, seg_hi.z + pad};
    if (qlo.x > hi_.x || qhi.x < lo_.x || qlo.y > hi_.y || qhi.y < lo_.y ||
        qlo.z > hi_.z || qhi.z < lo_.z)
      return;
    for_each_cell(qlo, qhi, [&](std::size_t cidx) {
      for (std::uint32_t i = cell_offsets_[cidx]; i < cell_offsets_[cidx + 1]; ++i)
        fn(ids_[i]);
    });
  }

  const Vec3& tri_lo(std::size_t t) const { return tri_lo_[t]; }
  const Vec3& tri_hi(std::size_t t) const { return tri_hi_[t]; }

 private:
  int axis_cells(double extent) const {
    return std::clamp(static_cast<int>(extent / cell_) + 1, 1, 256);
  }

  template <class Fn>
  void for_each_cell(const Vec3& alo, const Vec3& ahi, Fn&& fn) const {
    auto clampi = [](int v, int n) { return std::clamp(v, 0, n - 1); };
    int x0 = clampi(static_cast<int>(std::floor((alo.x - lo_.x) / cell_)), nx_);
    int x1 = clampi(static_cast<int>(std::floor((ahi.x - lo_.x) / cell_)), nx_);
    int y0 = clampi(static_cast<int>(std::floor((alo.y - lo_.y) / cell_)), ny_);
    int y1 = clampi(static_cast<int>(std::floor((ahi.y - lo_.y) / cell_)), ny_);
    int z0 = clampi(static_cast<int>(std::floor((alo.z - lo_.z) / cell_)), nz_);
    int z1 = clampi(static_cast<int>(std::floor((ahi.z - lo_.z) / cell_)), nz_);
    for (int z = z0; z <= z1; ++z)
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
          fn((static_cast<std::size_t>(z) * ny_ + y) * nx_ + x);
  }

  const TriangleMesh& mesh_;
  std::vector<Vec3> tri_lo_, tri_hi_;
  Vec3 lo_, hi_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1, nz_ = 1;
  std::vector<std::uint32_t> cell_offsets_;
  std::vector<std::uint32_t> ids_;
};

PruneResult rebuild_filtered(const VoxelGraph& g, const std::vector<std::uint8_t>& keep) {
  PruneResult res;
  res.graph.coords = g.coords;
  res.graph.spacing = g.spacing;
  res.graph.tag = g.tag;
  std::size_t n = g.n_vertices();
  res.graph.offsets.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    std::uint64_t d = 0;
    for (std::uint64_t i = g.offsets[v]; i < g.offsets[v + 1]; ++i) d += keep[i];
    res.graph.offsets[v + 1] = res.graph.offsets[v] + d;
  }
  res.graph.neighbors.resize(res.graph.offsets[n]);
  std::uint64_t at = 0;
  for (std::size_t v = 0; v < n; ++v)
    for (std::uint64_t i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
      if (keep[i]) res.graph.neighbors[at++] = g.neighbors[i];
      else if (g.neighbors[i] > v)
        res.removed.emplace_back(static_cast<std::uint32_t>(v), g.neighbors[i]);
    }
  return res;
}

std::uint64_t reverse_index(const VoxelGraph& g, std::uint32_t from, std::uint32_t to) {
  auto r = g.row(from);
  auto it = std::lower_bound(r.begin(), r.end(), to);
  return g.offsets[from] + static_cast<std::uint64_t>(it - r.begin());
}

}  // namespace

PruneResult prune_edges_by_surface(const VoxelGraph& g, const TriangleMesh& mesh) {
  if (mesh.n_triangles() == 0) {
    PruneResult res;
    res.graph = g;
    res.empty_mesh = true;
    return res;
  }
  TriGrid grid(mesh);
  std::size_t n = g.n_vertices();
  std::vector<std::uint8_t> keep(g.neighbors.size(), 1);

#pragma omp parallel num_threads(threads())
  {
    std::vector<std::uint32_t> stamp(mesh.n_triangles(), 0xffffffffu);
    std::uint32_t tick = 0;
#pragma omp for schedule(dynamic, 512)
    for (std::ptrdiff_t vi = 0; vi < static_cast<std::ptrdiff_t>(n); ++vi) {
      auto v = static_cast<std::uint32_t>(vi);
      Vec3 p0 = voxel_center(g.coords[v], g.spacing);
      for (std::uint64_t i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
        std::uint32_t nb = g.neighbors[i];
        if (nb <= v) continue;
        Vec3 p1 = voxel_center(g.coords[nb], g.spacing);
        Vec3 slo{std::min(p0.x, p1.x), std::min(p0.y, p1.y), std::min(p0.z, p1.z)};
        Vec3 shi{std::max(p0.x, p1.x), std::max(p0.y, p1.y), std::max(p0.z, p1.z)};
        bool hit = false;
        ++tick;
        grid.candidates(slo, shi, [&](std::uint32_t t) {
          if (hit || stamp[t] == tick) return;
          stamp[t] = tick;
          const auto& tri = mesh.triangles[t];
          if (segment_intersects_triangle(p0, p1, from_array(mesh.vertices[tri[0]]),
                                          from_array(mesh.vertices[tri[1]]),
                                          from_array(mesh.vertices[tri[2]])))
            hit = true;
        });
        if (hit) {
          keep[i] = 0;
          keep[reverse_index(g, nb, v)] = 0;
        }
      }
    }
  }
  return rebuild_filtered(g, keep);
}

PruneResult prune_edges_by_surface_serial(const VoxelGraph& g, const TriangleMesh& mesh) {
  if (mesh.n_triangles() == 0) {
    PruneResult res;
    res.graph = g;
    res.empty_mesh = true;
    return res;
  }
  std::size_t n = g.n_vertices();
  std::vector<std::uint8_t> keep(g.neighbors.size(), 1);
  for (std::uint32_t v = 0; v < n; ++v) {
    Vec3 p0 = voxel_center(g.coords[v], g.spacing);
    for (std::uint64_t i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
      std::uint32_t nb = g.neighbors[i];
      if (nb <= v) continue;
      Vec3 p1 = voxel_center(g.coords[nb], g.spacing);
      bool hit = false;
      for (const auto& tri : mesh.triangles) {
        if (segment_intersects_triangle(p0, p1, from_array(mesh.vertices[tri[0]]),
                                        from_array(mesh.vertices[tri[1]]),
                                        from_array(mesh.vertices[tri[2]]))) {
          hit = true;
          break;
        }
      }
      if (hit) {
        keep[i] = 0;
        keep[reverse_index(g, nb, v)] = 0;
      }
    }
  }
  return rebuild_filtered(g, keep);
}

}  // namespace cg
