#include "cortigraph/ordering.hpp"

#include <algorithm>

namespace cg {

namespace {

class Dissector {
 public:
  Dissector(const VoxelGraph& g) : g_(g), in_b_(g.n_vertices(), 0) {
    order_.reserve(g.n_vertices());
  }

  std::vector<std::uint32_t> run() {
    std::vector<std::uint32_t> ids(g_.n_vertices());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::uint32_t>(i);
    recurse(std::move(ids));
    return std::move(order_);
  }

 private:
  static constexpr std::size_t kLeaf = 48;

  void append_sorted(std::vector<std::uint32_t>& ids) {
    std::sort(ids.begin(), ids.end());
    order_.insert(order_.end(), ids.begin(), ids.end());
  }

  std::uint32_t coord(std::uint32_t v, int axis) const {
    const Voxel& c = g_.coords[v];
    return axis == 0 ? c.x : axis == 1 ? c.y : c.z;
  }

  void recurse(std::vector<std::uint32_t> ids) {
    if (ids.size() <= kLeaf) {
      append_sorted(ids);
      return;
    }
    std::uint32_t lo[3] = {0xffffffffu, 0xffffffffu, 0xffffffffu};
    std::uint32_t hi[3] = {0, 0, 0};
    for (std::uint32_t v : ids)
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], coord(v, a));
        hi[a] = std::max(hi[a], coord(v, a));
      }
    int axis = 0;
    for (int a = 1; a < 3; ++a)
      if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
    if (hi[axis] == lo[axis]) {
      // Degenerate cloud (all voxels coincide along every axis); cannot
      // happen for distinct voxels, but do not loop forever if it does.
      append_sorted(ids);
      return;
    }
    std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
      std::uint32_t ca = coord(a, axis), cb = coord(b, axis);
      return ca != cb ? ca < cb : a < b;
    });
    std::size_t mid = ids.size() / 2;

    std::vector<std::uint32_t> part_b(ids.begin() + static_cast<std::ptrdiff_t>(mid),
                                      ids.end());
    ids.resize(mid);
    for (std::uint32_t v : part_b) in_b_[v] = 1;
    std::vector<std::uint32_t> separator;
    std::vector<std::uint32_t> part_a;
    part_a.reserve(ids.size());
    for (std::uint32_t v : ids) {
      bool boundary = false;
      for (std::uint32_t nb : g_.row(v))
        if (in_b_[nb]) {
          boundary = true;
          break;
        }
      (boundary ? separator : part_a).push_back(v);
    }
    for (std::uint32_t v : part_b) in_b_[v] = 0;

    if (!part_a.empty()) recurse(std::move(part_a));
    recurse(std::move(part_b));
    append_sorted(separator);
  }

  const VoxelGraph& g_;
  std::vector<std::uint8_t> in_b_;
  std::vector<std::uint32_t> order_;
};

}  // namespace

std::vector<std::uint32_t> nested_dissection_order(const VoxelGraph& g) {
  if (g.n_vertices() == 0) return {};
  return Dissector(g).run();
}

}  // namespace cg
