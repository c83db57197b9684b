#pragma once

#include <utility>
#include <vector>

#include "cortigraph/graph.hpp"
#include "cortigraph/mesh.hpp"

namespace cg {

struct PruneResult {
  VoxelGraph graph;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> removed;  // (a < b), sorted
  bool empty_mesh = false;

  std::size_t n_removed() const { return removed.size(); }
};

// Removes every edge whose center-to-center segment (in world coordinates,
// voxel center (c + 0.5) * spacing) intersects any mesh triangle. Vertices
// are never removed; a vertex that loses all edges stays as an isolated
// vertex. An empty mesh leaves the graph unchanged and sets empty_mesh.
PruneResult prune_edges_by_surface(const VoxelGraph& g, const TriangleMesh& mesh);

// Reference implementation: no lookup grid, no parallelism, every edge
// tested against every triangle.
PruneResult prune_edges_by_surface_serial(const VoxelGraph& g, const TriangleMesh& mesh);

}  // namespace cg
