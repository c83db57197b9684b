#pragma once

#include "cortigraph/spectral/lanczos.hpp"

namespace cg {

// Row i is the spectral coordinate of vertex i: the i-th entries of the
// first `dim` eigenvectors, in eigenvalue order.
struct Embedding {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> points;  // row-major n x dim

  const double* row(std::size_t i) const { return points.data() + i * dim; }
};

struct EmbeddingOptions {
  bool row_normalize = false;  // scale each row to unit norm (zero rows stay zero)
  LanczosOptions solver;
};

// Rows are raw eigenvector entries by default; the first eigenvector of a
// connected graph is the scaled degree vector, which carries volume
// information the clustering is allowed to use.
Embedding spectral_embedding(const SparseSymLaplacian& L, std::size_t n_components,
                             const EmbeddingOptions& opts = {});

Embedding embedding_from_eigenpairs(const EigenpairSet& eig, bool row_normalize = false);

}  // namespace cg
