#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "cortigraph/laplacian.hpp"

namespace cg {

// Sparse LDL^T factorization of L - sigma*I with a caller-visible inertia
// count. The matrix is permuted once (by the Laplacian's geometric order
// when present, AMD otherwise) and the symbolic analysis is reused across
// shifts; refactorizing for a new sigma only rewrites the diagonal.
//
// No numerical pivoting is performed, so a shift that collides with an
// eigenvalue shows up as a tiny pivot; callers decide how to retry.
class LaplacianFactor {
 public:
  explicit LaplacianFactor(const SparseSymLaplacian& L);
  ~LaplacianFactor();
  LaplacianFactor(const LaplacianFactor&) = delete;
  LaplacianFactor& operator=(const LaplacianFactor&) = delete;

  struct Info {
    bool ok = false;             // factorization completed with finite pivots
    std::size_t n_negative = 0;  // negative pivots = eigenvalues below sigma
    std::size_t n_tiny = 0;      // pivots with |d| < kTinyPivot
    double min_abs_pivot = 0.0;
    double sigma = 0.0;
  };

  static constexpr double kTinyPivot = 1e-12;

  Info factorize(double sigma);

  // x = (L - sigma*I)^{-1} b for the last factorized sigma.
  void solve(const double* b, double* x) const;

  std::size_t n() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cg
