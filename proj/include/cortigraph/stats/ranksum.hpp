#pragma once

#include <cstddef>
#include <span>

namespace cg {

enum class RankSumMethod {
  ExactShift,        // integer-count distribution of the rank sum (tie-free)
  ExactEnumeration,  // all subsets of pooled midranks (ties allowed)
  NormalApprox,      // tie-corrected normal with continuity correction
};

struct RankSumResult {
  double u_statistic = 0.0;  // Mann-Whitney U of the first sample
  double rank_sum = 0.0;     // midrank sum of the first sample
  double p_two_sided = 1.0;
  RankSumMethod method = RankSumMethod::NormalApprox;
  std::size_t n1 = 0, n2 = 0;
  bool ties_present = false;
  bool tie_correction_applied = false;
};

// Two-sided Wilcoxon rank-sum / Mann-Whitney test with midranks. Exact
// regimes: n1 + n2 <= 20 without ties (rank-sum distribution by dynamic
// programming over integer counts), n1 + n2 <= 14 with ties (complete
// enumeration; midranks are multiples of 1/2, so sums compare exactly).
// Everything larger uses the normal approximation with tie-corrected
// variance and a 1/2 continuity correction. The exact two-sided p-value is
// min(1, 2 * min(P[W <= w], P[W >= w])), computed from integer counts so
// that swapping the samples gives the identical result.
RankSumResult ranksum_test(std::span<const double> a, std::span<const double> b);

}  // namespace cg
