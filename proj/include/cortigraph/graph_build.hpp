#pragma once

#include "cortigraph/graph.hpp"
#include "cortigraph/voxel_mask.hpp"

namespace cg {

// Two voxels are adjacent when each grid index differs by at most one and
// they are distinct (Chebyshev distance 1). `connectivity` restricts the
// neighborhood: 6 keeps face neighbors, 18 face+edge, 26 the full cube.
VoxelGraph build_voxel_graph(const VoxelMask& mask, int connectivity = 26);

// Straight-line reference used by tests and the kernel benchmark. Same
// contract, no parallelism, no lookup grid.
VoxelGraph build_voxel_graph_serial(const VoxelMask& mask, int connectivity = 26);

}  // namespace cg
