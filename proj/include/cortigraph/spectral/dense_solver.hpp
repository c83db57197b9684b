#pragma once

#include <cstddef>
#include <vector>

#include "cortigraph/laplacian.hpp"

namespace cg {

struct EigenpairSet {
  std::size_t n = 0;  // vector length
  std::size_t k = 0;  // number of pairs
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // column-major n x k, unit norm
  double tolerance = 0.0;       // residual bound the pairs satisfy

  const double* vec(std::size_t j) const { return vectors.data() + j * n; }
  double* vec(std::size_t j) { return vectors.data() + j * n; }
};

inline constexpr std::size_t kDenseSpectrumCap = 2000;

// Full eigendecomposition by Householder tridiagonalization and implicit-
// shift QL. Self-contained (no external linear algebra) so it can serve as
// an independent oracle for the sparse paths. O(n^3); refuses n > cap.
EigenpairSet dense_spectrum(const SparseSymLaplacian& L,
                            std::size_t cap = kDenseSpectrumCap);

// Reduce symmetric A (column-major, overwritten with the accumulated
// orthogonal Q) to tridiagonal form: d = diagonal, e[i] couples rows i-1
// and i (e[0] = 0).
void householder_tridiagonalize(std::vector<double>& a, std::size_t n,
                                std::vector<double>& d, std::vector<double>& e);

// Eigen-decomposition of a symmetric tridiagonal matrix. On entry (d, e)
// as above and z is a column-major n x n matrix (identity, or Q to get the
// eigenvectors of the original dense matrix). On exit d holds ascending
// eigenvalues and column j of z the matching eigenvector.
void tridiag_eigen(std::vector<double>& d, std::vector<double>& e,
                   std::vector<double>& z, std::size_t n);

// Number of eigenvalues of tridiag(d, e) strictly below sigma, by Sturm
// sequence / LDL^T sign count. Robust at any shift.
std::size_t sturm_count_below(const std::vector<double>& d, const std::vector<double>& e,
                              std::size_t n, double sigma);

}  // namespace cg
