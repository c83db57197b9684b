#pragma once

#include <cstdint>
#include <vector>

#include "cortigraph/graph.hpp"

namespace cg {

// Geometric nested dissection: recursive coordinate bisection with the
// boundary layer of one half used as the separator, ordered last. Voxel
// graphs are thin folded sheets, so coordinate splits give small separators
// and far lower factorization fill than degree-based heuristics. Returns
// order[k] = vertex id eliminated at position k.
std::vector<std::uint32_t> nested_dissection_order(const VoxelGraph& g);

}  // namespace cg
