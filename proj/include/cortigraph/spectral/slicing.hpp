#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cortigraph/laplacian.hpp"

namespace cg {

class LaplacianFactor;

struct BandSpec {
  double lo = 0.0;
  double hi = 0.1;
  std::size_t n_bands = 10;

  // Equally spaced boundaries; bands are [b_k, b_{k+1}) except the last,
  // which is closed at hi.
  std::vector<double> boundaries() const;
  void validate() const;
};

struct SliceStats {
  std::size_t n_factorizations = 0;
  std::size_t n_perturb_retries = 0;   // shift collided with a tiny pivot
  std::size_t n_dense_fallbacks = 0;   // resolved via tridiagonal Sturm count
};

inline constexpr double kShiftPerturb = 1e-8;
inline constexpr std::size_t kSturmFallbackCap = 2048;

// Number of eigenvalues of L strictly below sigma, by Sylvester inertia of
// LDL^T(L - sigma I): the negative pivot count. Shifts at or below zero
// return 0 without factoring (the spectrum is nonnegative); shifts above 2
// return n. A tiny pivot means sigma essentially collided with an
// eigenvalue; the count is retried at sigma + 1e-8 and recorded in stats.
// If that is still unstable, small operators fall back to a dense
// tridiagonalization plus Sturm count.
std::size_t count_eigenvalues_below(const SparseSymLaplacian& L, double sigma,
                                    SliceStats* stats = nullptr);

// Same, reusing a prepared factorization object across shifts.
std::size_t count_eigenvalues_below(const SparseSymLaplacian& L, LaplacianFactor& factor,
                                    double sigma, SliceStats* stats = nullptr);

struct BandHistogram {
  BandSpec spec;
  std::vector<std::uint64_t> counts;  // one per band
  std::string graph_id;

  // When positive, CSV output gains a count/divisor column (used to report
  // global counts per parcel).
  double per_parcel_divisor = 0.0;

  std::uint64_t total() const;
};

// Eigenvalue counts per band via successive inertia counts: one
// factorization per distinct boundary, counts by difference. The final
// band is closed by counting at hi + 1e-8.
BandHistogram band_histogram(const SparseSymLaplacian& L, const BandSpec& spec = {},
                             SliceStats* stats = nullptr);

// CSV: "graph_id,band_lo,band_hi,count" with an extra count_per_parcel
// column when any histogram carries a divisor. One row per band per graph.
// The reader recovers the divisor from the first nonzero-count row; a
// histogram whose counts are all zero reads back with divisor 0.
void write_band_histogram_csv(const std::string& path,
                              const std::vector<BandHistogram>& hists);
std::vector<BandHistogram> read_band_histogram_csv(const std::string& path);

}  // namespace cg
