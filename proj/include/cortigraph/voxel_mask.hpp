#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cortigraph/common.hpp"

namespace cg {

// A binary voxel mask on a regular grid. Voxels are stored as a sorted,
// duplicate-free list of (x, y, z) grid indices; sort order is lexicographic
// by (z, y, x), which is also the canonical vertex order of graphs built
// from the mask. The world-space center of voxel (x, y, z) is
// ((x+0.5)*sx, (y+0.5)*sy, (z+0.5)*sz).
struct Voxel {
  std::uint32_t x, y, z;

  friend bool operator==(const Voxel&, const Voxel&) = default;
};

inline bool voxel_less_zyx(const Voxel& a, const Voxel& b) {
  if (a.z != b.z) return a.z < b.z;
  if (a.y != b.y) return a.y < b.y;
  return a.x < b.x;
}

struct VoxelMask {
  Dims dims{0, 0, 0};
  Spacing spacing{1.0, 1.0, 1.0};
  std::vector<Voxel> voxels;  // sorted by (z, y, x), no duplicates
  std::string tag;            // provenance label, carried into graphs

  std::size_t size() const { return voxels.size(); }
  bool in_bounds(const Voxel& v) const {
    return v.x < dims[0] && v.y < dims[1] && v.z < dims[2];
  }
};

// Sorts, checks bounds and duplicates, rejects empty masks and zero or
// negative spacing. Every loader and generator funnels through this.
void validate_and_canonicalize(VoxelMask& mask);

}  // namespace cg
