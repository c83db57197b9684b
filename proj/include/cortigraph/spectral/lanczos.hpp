#pragma once

#include <cstdint>

#include "cortigraph/laplacian.hpp"
#include "cortigraph/spectral/dense_solver.hpp"

namespace cg {

struct LanczosOptions {
  double tol = 1e-8;        // accepted true residual ||L v - lambda v||
  std::uint64_t seed = 42;  // start-vector stream
  double sigma = -1e-3;     // spectral shift; must be negative so L - sigma I is SPD
  std::size_t max_restarts = 0;  // 0 = 40 + 10k
};

// Smallest k eigenpairs of the normalized Laplacian by shift-invert Lanczos
// with full reorthogonalization. Converged pairs are locked and deflated;
// each restart draws a fresh seeded start vector, which is what resolves
// eigenvalue multiplicities (a single Krylov run can only ever see one
// vector per eigenspace). Accepted pairs satisfy the true-residual test
// against L itself, eigenvalues are Rayleigh quotients, vectors are unit
// norm with a canonical sign (largest-magnitude entry positive, first index
// winning ties). Deterministic for fixed (L, k, options), including across
// thread counts.
EigenpairSet smallest_eigenpairs(const SparseSymLaplacian& L, std::size_t k,
                                 const LanczosOptions& opts = {});

}  // namespace cg
