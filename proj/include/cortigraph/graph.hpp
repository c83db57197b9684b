#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cortigraph/common.hpp"
#include "cortigraph/voxel_mask.hpp"

namespace cg {

// Unweighted undirected voxel-adjacency graph in CSR form. Vertices are the
// in-mask voxels in (z, y, x)-lexicographic order; `coords[i]` is the grid
// index of vertex i. Both directions of every edge are stored, neighbor
// lists are sorted ascending, and there are no self-loops. `n_edges()` is
// the undirected count.
struct VoxelGraph {
  std::vector<std::uint64_t> offsets;  // size n+1
  std::vector<std::uint32_t> neighbors;
  std::vector<Voxel> coords;
  Spacing spacing{1.0, 1.0, 1.0};
  std::string tag;

  std::size_t n_vertices() const { return coords.size(); }
  std::size_t n_edges() const { return neighbors.size() / 2; }
  std::uint64_t degree(std::size_t v) const { return offsets[v + 1] - offsets[v]; }
  std::span<const std::uint32_t> row(std::size_t v) const {
    return {neighbors.data() + offsets[v],
            static_cast<std::size_t>(offsets[v + 1] - offsets[v])};
  }
  bool has_edge(std::uint32_t a, std::uint32_t b) const;
};

// Checks CSR shape, sortedness, symmetry, and absence of self-loops.
// Cheap enough to run after every structural operation in tests.
void validate_graph(const VoxelGraph& g);

// Induced subgraph on `vertex_ids` (must be sorted, unique, in range).
// Vertex i of the result is vertex_ids[i]; edges between selected vertices
// survive, everything else is dropped.
VoxelGraph extract_subgraph(const VoxelGraph& g, std::span<const std::uint32_t> vertex_ids);

struct ComponentLabels {
  std::vector<std::uint32_t> labels;  // per vertex, 0-based
  std::uint32_t count = 0;
  std::vector<std::uint64_t> sizes;   // per component
};

// BFS labeling. Components are numbered by their smallest vertex id, so the
// labeling is canonical for a given graph.
ComponentLabels connected_components(const VoxelGraph& g);

// GRF v1: little-endian binary CSR container.
//   magic "GRF1"
//   u64 n_vertices, u64 n_directed_edges
//   u64 offsets[n+1]
//   u32 neighbors[n_directed_edges]
//   u32 coords[3 * n]   (x, y, z per vertex)
void save_graph_grf(const VoxelGraph& g, const std::string& path);
VoxelGraph load_graph_grf(const std::string& path);

// Adjacency-list JSON for small graphs (debugging, plotting); refuses
// graphs beyond the size cap to avoid accidental gigabyte files.
inline constexpr std::size_t kGraphJsonMaxVertices = 10000;
void save_graph_json(const VoxelGraph& g, const std::string& path);

}  // namespace cg
