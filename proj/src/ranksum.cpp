#include "cortigraph/stats/ranksum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "cortigraph/common.hpp"

namespace cg {

namespace {

constexpr std::size_t kExactShiftMax = 20;   // pooled size, tie-free
constexpr std::size_t kExactEnumMax = 14;    // pooled size, with ties

// Midranks of the pooled sample; out[i] matches pooled[i]'s position.
std::vector<double> midranks(const std::vector<double>& pooled) {
  std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    double r = 0.5 * static_cast<double>(i + 1 + j + 1);  // average of 1-based ranks
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double two_sided_from_counts(std::uint64_t count_le, std::uint64_t count_ge,
                             std::uint64_t total) {
  std::uint64_t tail = std::min(count_le, count_ge);
  double p = 2.0 * static_cast<double>(tail) / static_cast<double>(total);
  return std::min(p, 1.0);
}

// Tie-free exact test: the distribution of the rank sum of a size-n1
// subset of ranks {1..N}, as integer subset counts.
double exact_shift_p(std::size_t n1, std::size_t n2, std::int64_t w_obs) {
  std::size_t n = n1 + n2;
  std::size_t w_max = 0;
  for (std::size_t r = n - n1 + 1; r <= n; ++r) w_max += r;
  // count[j][w] = number of size-j subsets of the ranks seen so far with sum w
  std::vector<std::vector<std::uint64_t>> count(
      n1 + 1, std::vector<std::uint64_t>(w_max + 1, 0));
  count[0][0] = 1;
  for (std::size_t r = 1; r <= n; ++r)
    for (std::size_t j = std::min(n1, r); j >= 1; --j)
      for (std::size_t w = w_max; w >= r; --w)
        count[j][w] += count[j - 1][w - r];

  std::uint64_t le = 0, ge = 0, total = 0;
  for (std::size_t w = 0; w <= w_max; ++w) {
    std::uint64_t c = count[n1][w];
    total += c;
    if (static_cast<std::int64_t>(w) <= w_obs) le += c;
    if (static_cast<std::int64_t>(w) >= w_obs) ge += c;
  }
  return two_sided_from_counts(le, ge, total);
}

// Exact test with ties: enumerate every size-n1 subset of the pooled
// midranks. Midranks are multiples of 1/2, so sums are exact doubles and
// the comparisons below are exact.
double exact_enum_p(const std::vector<double>& ranks, std::size_t n1, double w_obs) {
  std::size_t n = ranks.size();
  std::vector<std::size_t> idx(n1);
  std::iota(idx.begin(), idx.end(), 0);
  std::uint64_t le = 0, ge = 0, total = 0;
  for (;;) {
    double w = 0.0;
    for (std::size_t i : idx) w += ranks[i];
    ++total;
    if (w <= w_obs) ++le;
    if (w >= w_obs) ++ge;
    // next combination
    std::size_t i = n1;
    while (i > 0) {
      --i;
      if (idx[i] != i + n - n1) {
        ++idx[i];
        for (std::size_t j = i + 1; j < n1; ++j) idx[j] = idx[j - 1] + 1;
        break;
      }
      if (i == 0) {
        if (total != binomial(n, n1))
          fail("ranksum: enumeration count mismatch (internal error)");
        return two_sided_from_counts(le, ge, total);
      }
    }
  }
}

}  // namespace

RankSumResult ranksum_test(std::span<const double> a, std::span<const double> b) {
  std::size_t n1 = a.size(), n2 = b.size();
  if (n1 == 0 || n2 == 0) fail("ranksum: both samples must be non-empty");
  std::vector<double> pooled;
  pooled.reserve(n1 + n2);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  for (double v : pooled)
    if (!std::isfinite(v)) fail("ranksum: samples must be finite");

  std::vector<double> ranks = midranks(pooled);
  double w = 0.0;
  for (std::size_t i = 0; i < n1; ++i) w += ranks[i];

  RankSumResult res;
  res.n1 = n1;
  res.n2 = n2;
  res.rank_sum = w;
  res.u_statistic = w - 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1);

  {
    std::vector<double> sorted(pooled);
    std::sort(sorted.begin(), sorted.end());
    res.ties_present = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
  }

  std::size_t n = n1 + n2;
  if (!res.ties_present && n <= kExactShiftMax) {
    res.method = RankSumMethod::ExactShift;
    res.p_two_sided = exact_shift_p(n1, n2, std::llround(w));
    return res;
  }
  if (res.ties_present && n <= kExactEnumMax) {
    res.method = RankSumMethod::ExactEnumeration;
    res.p_two_sided = exact_enum_p(ranks, n1, w);
    return res;
  }

  res.method = RankSumMethod::NormalApprox;
  double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2);
  double dn = static_cast<double>(n);
  double mu = 0.5 * dn1 * dn2;
  double tie_term = 0.0;
  if (res.ties_present) {
    std::vector<double> sorted(pooled);
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
      double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
    res.tie_correction_applied = tie_term > 0.0;
  }
  double var = dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (!(var > 0.0)) {
    // Every pooled value identical: no evidence either way.
    res.p_two_sided = 1.0;
    return res;
  }
  double z = (std::abs(res.u_statistic - mu) - 0.5) / std::sqrt(var);
  if (z < 0.0) z = 0.0;
  res.p_two_sided = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return res;
}

}  // namespace cg
