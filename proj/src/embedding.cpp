#include "cortigraph/parcellation/embedding.hpp"

#include <cmath>

namespace cg {

Embedding embedding_from_eigenpairs(const EigenpairSet& eig, bool row_normalize) {
  Embedding emb;
  emb.n = eig.n;
  emb.dim = eig.k;
  emb.points.resize(eig.n * eig.k);
  for (std::size_t i = 0; i < eig.n; ++i)
    for (std::size_t j = 0; j < eig.k; ++j)
      emb.points[i * eig.k + j] = eig.vec(j)[i];
  if (row_normalize) {
    for (std::size_t i = 0; i < eig.n; ++i) {
      double* row = emb.points.data() + i * emb.dim;
      double s = 0.0;
      for (std::size_t j = 0; j < emb.dim; ++j) s += row[j] * row[j];
      if (s > 0.0) {
        double inv = 1.0 / std::sqrt(s);
        for (std::size_t j = 0; j < emb.dim; ++j) row[j] *= inv;
      }
    }
  }
  return emb;
}

Embedding spectral_embedding(const SparseSymLaplacian& L, std::size_t n_components,
                             const EmbeddingOptions& opts) {
  if (n_components == 0) fail("spectral_embedding: need at least one component");
  EigenpairSet eig = smallest_eigenpairs(L, n_components, opts.solver);
  return embedding_from_eigenpairs(eig, opts.row_normalize);
}

}  // namespace cg
