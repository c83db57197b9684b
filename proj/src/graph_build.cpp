#include "cortigraph/graph_build.hpp"

#include <algorithm>
#include <unordered_map>

#include "cortigraph/parallel.hpp"

namespace cg {

namespace {

struct Offset {
  int dx, dy, dz;
};

// Offsets in (dz, dy, dx)-lexicographic order. Because vertices are sorted
// by (z, y, x), walking offsets in this order emits neighbor ids in
// ascending order, so CSR rows come out sorted for free.
std::vector<Offset> neighbor_offsets(int connectivity) {
  if (connectivity != 6 && connectivity != 18 && connectivity != 26)
    fail("connectivity must be 6, 18, or 26, got %d", connectivity);
  std::vector<Offset> offs;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        int nnz = (dx != 0) + (dy != 0) + (dz != 0);
        if (nnz == 0) continue;
        if (connectivity == 6 && nnz > 1) continue;
        if (connectivity == 18 && nnz > 2) continue;
        offs.push_back({dx, dy, dz});
      }
  return offs;
}

constexpr std::uint32_t kAbsent = 0xffffffffu;

// Voxel-to-vertex lookup. Dense grid when it is affordable, hash map
// otherwise; both return kAbsent for out-of-mask cells.
class VoxelLookup {
 public:
  VoxelLookup(const VoxelMask& mask) : dims_(mask.dims) {
    std::size_t cells = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
    std::size_t budget = std::max<std::size_t>(1u << 26, 32 * mask.size());
    if (cells <= budget) {
      grid_.assign(cells, kAbsent);
      for (std::size_t i = 0; i < mask.size(); ++i)
        grid_[flat(mask.voxels[i])] = static_cast<std::uint32_t>(i);
    } else {
      map_.reserve(mask.size() * 2);
      for (std::size_t i = 0; i < mask.size(); ++i)
        map_.emplace(flat(mask.voxels[i]), static_cast<std::uint32_t>(i));
    }
  }

  std::uint32_t find(std::int64_t x, std::int64_t y, std::int64_t z) const {
    if (x < 0 || y < 0 || z < 0 || x >= dims_[0] || y >= dims_[1] || z >= dims_[2])
      return kAbsent;
    std::uint64_t key = (static_cast<std::uint64_t>(z) * dims_[1] +
                         static_cast<std::uint64_t>(y)) * dims_[0] +
                        static_cast<std::uint64_t>(x);
    if (!grid_.empty()) return grid_[key];
    auto it = map_.find(key);
    return it == map_.end() ? kAbsent : it->second;
  }

 private:
  std::uint64_t flat(const Voxel& v) const {
    return (static_cast<std::uint64_t>(v.z) * dims_[1] + v.y) * dims_[0] + v.x;
  }

  Dims dims_;
  std::vector<std::uint32_t> grid_;
  std::unordered_map<std::uint64_t, std::uint32_t> map_;
};

void check_canonical(const VoxelMask& mask) {
  if (mask.voxels.empty()) fail("mask '%s': empty mask", mask.tag.c_str());
  if (mask.size() >= kAbsent)
    fail("mask '%s': %zu voxels exceed the 32-bit vertex id space", mask.tag.c_str(),
         mask.size());
  for (std::size_t i = 1; i < mask.size(); ++i)
    if (!voxel_less_zyx(mask.voxels[i - 1], mask.voxels[i]))
      fail("mask '%s': voxels not in canonical (z, y, x) order; load or validate first",
           mask.tag.c_str());
  for (const Voxel& v : mask.voxels)
    if (!mask.in_bounds(v))
      fail("mask '%s': voxel (%u, %u, %u) out of bounds", mask.tag.c_str(), v.x, v.y, v.z);
}

}  // namespace

VoxelGraph build_voxel_graph(const VoxelMask& mask, int connectivity) {
  std::vector<Offset> offs = neighbor_offsets(connectivity);
  check_canonical(mask);
  VoxelLookup lookup(mask);

  std::size_t n = mask.size();
  VoxelGraph g;
  g.coords = mask.voxels;
  g.spacing = mask.spacing;
  g.tag = mask.tag;
  g.offsets.assign(n + 1, 0);

  std::vector<std::uint32_t> degree(n, 0);
#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const Voxel& v = mask.voxels[static_cast<std::size_t>(i)];
    std::uint32_t d = 0;
    for (const Offset& o : offs)
      if (lookup.find(static_cast<std::int64_t>(v.x) + o.dx,
                      static_cast<std::int64_t>(v.y) + o.dy,
                      static_cast<std::int64_t>(v.z) + o.dz) != kAbsent)
        ++d;
    degree[static_cast<std::size_t>(i)] = d;
  }
  for (std::size_t i = 0; i < n; ++i) g.offsets[i + 1] = g.offsets[i] + degree[i];
  g.neighbors.resize(g.offsets[n]);

#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const Voxel& v = mask.voxels[static_cast<std::size_t>(i)];
    std::uint64_t at = g.offsets[static_cast<std::size_t>(i)];
    for (const Offset& o : offs) {
      std::uint32_t nb = lookup.find(static_cast<std::int64_t>(v.x) + o.dx,
                                     static_cast<std::int64_t>(v.y) + o.dy,
                                     static_cast<std::int64_t>(v.z) + o.dz);
      if (nb != kAbsent) g.neighbors[at++] = nb;
    }
  }
  return g;
}

VoxelGraph build_voxel_graph_serial(const VoxelMask& mask, int connectivity) {
  std::vector<Offset> offs = neighbor_offsets(connectivity);
  check_canonical(mask);
  VoxelLookup lookup(mask);

  std::size_t n = mask.size();
  VoxelGraph g;
  g.coords = mask.voxels;
  g.spacing = mask.spacing;
  g.tag = mask.tag;
  g.offsets.assign(n + 1, 0);
  g.neighbors.reserve(n * (connectivity == 6 ? 4 : 14));
  for (std::size_t i = 0; i < n; ++i) {
    const Voxel& v = mask.voxels[i];
    for (const Offset& o : offs) {
      std::uint32_t nb = lookup.find(static_cast<std::int64_t>(v.x) + o.dx,
                                     static_cast<std::int64_t>(v.y) + o.dy,
                                     static_cast<std::int64_t>(v.z) + o.dz);
      if (nb != kAbsent) g.neighbors.push_back(nb);
    }
    g.offsets[i + 1] = g.neighbors.size();
  }
  return g;
}

}  // namespace cg
