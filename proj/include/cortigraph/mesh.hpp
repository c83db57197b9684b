#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace cg {

// Triangle soup in world coordinates. No connectivity is assumed; pruning
// only needs the triangles themselves.
struct TriangleMesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  std::size_t n_triangles() const { return triangles.size(); }
};

}  // namespace cg
