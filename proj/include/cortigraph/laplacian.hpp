#pragma once

#include <cstdint>
#include <vector>

#include "cortigraph/graph.hpp"

namespace cg {

// Symmetric normalized Laplacian L = I - D^{-1/2} A D^{-1/2} in CSR form.
// The diagonal entry is always stored explicitly: 1 for vertices with
// neighbors, 0 for isolated vertices (whose rows are otherwise empty, and
// which therefore contribute eigenvalue 0). Off-diagonals for an edge
// (i, j) are -1/sqrt(deg_i * deg_j). The spectrum lies in [0, 2] and the
// multiplicity of eigenvalue 0 equals the number of connected components.
struct SparseSymLaplacian {
  std::size_t n = 0;
  std::vector<std::uint64_t> offsets;  // n+1
  std::vector<std::uint32_t> cols;     // sorted within each row
  std::vector<double> values;
  std::vector<std::uint32_t> degree;   // graph degree per vertex

  // Optional fill-reducing elimination order (order[k] = vertex at
  // position k) carried from the graph's geometry; factorizations use it
  // when present and fall back to AMD otherwise.
  std::vector<std::uint32_t> nd_order;

  std::size_t nnz() const { return cols.size(); }
};

SparseSymLaplacian normalized_laplacian(const VoxelGraph& g);

// y = L x. The parallel version is row-parallel and bitwise deterministic
// for any thread count (each output element is one serial dot product).
void laplacian_matvec(const SparseSymLaplacian& L, const double* x, double* y);
void laplacian_matvec_serial(const SparseSymLaplacian& L, const double* x, double* y);

}  // namespace cg
