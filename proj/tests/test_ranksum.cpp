#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "cortigraph/common.hpp"
#include "cortigraph/stats/ranksum.hpp"

using namespace cg;

namespace {

// Exact two-sided p by brute force: enumerate every n1-subset of the pooled
// midranks and count subsets with rank sum <= / >= the observed one.
double brute_force_p(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n1 = a.size(), n = a.size() + b.size();
  std::vector<double> pool(a.begin(), a.end());
  pool.insert(pool.end(), b.begin(), b.end());

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return pool[x] < pool[y]; });

  // midranks in units of 1/2 so every comparison is integer-exact
  std::vector<long long> rank2(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && pool[order[j]] == pool[order[i]]) ++j;
    const long long twice = static_cast<long long>(i + 1 + j);  // 2 * average rank
    for (std::size_t t = i; t < j; ++t) rank2[order[t]] = twice;
    i = j;
  }

  long long observed = 0;
  for (std::size_t t = 0; t < n1; ++t) observed += rank2[t];

  std::size_t le = 0, ge = 0, total = 0;
  std::vector<char> pick(n, 0);  // ascending start covers every combination
  std::fill(pick.end() - static_cast<std::ptrdiff_t>(n1), pick.end(), 1);
  do {
    long long s = 0;
    for (std::size_t t = 0; t < n; ++t)
      if (pick[t]) s += rank2[t];
    ++total;
    if (s <= observed) ++le;
    if (s >= observed) ++ge;
  } while (std::next_permutation(pick.begin(), pick.end()));

  const double p = 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total);
  return std::min(1.0, p);
}

}  // namespace

TEST_CASE("textbook fixed cases") {
  {
    const std::vector<double> a{1, 2}, b{3, 4};
    const RankSumResult r = ranksum_test(a, b);
    CHECK(r.p_two_sided == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(r.method == RankSumMethod::ExactShift);
    CHECK(r.n1 == 2);
    CHECK(r.n2 == 2);
    CHECK(r.u_statistic == doctest::Approx(0.0));
    CHECK(r.rank_sum == doctest::Approx(3.0));
  }
  {
    const std::vector<double> a{1, 2, 3, 4, 5}, b{6, 7, 8, 9, 10};
    const RankSumResult r = ranksum_test(a, b);
    // most extreme split: 2 / C(10,5) = 2/252
    CHECK(r.p_two_sided == doctest::Approx(2.0 / 252.0).epsilon(1e-12));
  }
  {
    const std::vector<double> a{5, 5, 5}, b{5, 5, 5};
    const RankSumResult r = ranksum_test(a, b);
    CHECK(r.p_two_sided == doctest::Approx(1.0));
    CHECK(r.ties_present);
  }
}

TEST_CASE("exact methods match subset enumeration, tie-free") {
  Rng rng(501);
  for (std::size_t n1 = 1; n1 <= 7; ++n1)
    for (std::size_t n2 = 1; n2 <= 7; ++n2) {
      std::vector<double> a(n1), b(n2);
      for (double& v : a) v = rng.next_double();
      for (double& v : b) v = rng.next_double();
      const RankSumResult r = ranksum_test(a, b);
      CHECK(r.method == RankSumMethod::ExactShift);
      CHECK(std::abs(r.p_two_sided - brute_force_p(a, b)) < 1e-12);
    }
}

TEST_CASE("exact methods match subset enumeration, with ties") {
  Rng rng(502);
  for (std::size_t n1 = 1; n1 <= 7; ++n1)
    for (std::size_t n2 = 1; n2 <= 7; ++n2) {
      std::vector<double> a(n1), b(n2);
      // small integer support forces ties
      for (double& v : a) v = std::floor(rng.next_double() * 4);
      for (double& v : b) v = std::floor(rng.next_double() * 4);
      const RankSumResult r = ranksum_test(a, b);
      CHECK(std::abs(r.p_two_sided - brute_force_p(a, b)) < 1e-12);
    }
}

TEST_CASE("swapping samples changes nothing") {
  Rng rng(503);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> a(3 + static_cast<std::size_t>(rng.next_double() * 5));
    std::vector<double> b(3 + static_cast<std::size_t>(rng.next_double() * 5));
    const bool tie = rep % 2 == 0;
    for (double& v : a) v = tie ? std::floor(rng.next_double() * 3) : rng.next_double();
    for (double& v : b) v = tie ? std::floor(rng.next_double() * 3) : rng.next_double();
    const RankSumResult ab = ranksum_test(a, b);
    const RankSumResult ba = ranksum_test(b, a);
    CHECK(ab.p_two_sided == ba.p_two_sided);
  }
}

TEST_CASE("method selection by pooled size and ties") {
  std::vector<double> a(10), b(10);
  for (std::size_t i = 0; i < 10; ++i) {
    a[i] = static_cast<double>(2 * i);
    b[i] = static_cast<double>(2 * i) + 0.5;
  }
  CHECK(ranksum_test(a, b).method == RankSumMethod::ExactShift);  // N = 20, tie-free

  a.push_back(100.0);
  CHECK(ranksum_test(a, b).method == RankSumMethod::NormalApprox);  // N = 21

  const std::vector<double> ta{1, 1, 2, 3, 4, 5, 6}, tb{2, 5, 7, 8, 9, 10, 11};
  const RankSumResult tied = ranksum_test(ta, tb);  // N = 14 with ties
  CHECK(tied.method == RankSumMethod::ExactEnumeration);
  CHECK(tied.ties_present);

  std::vector<double> ta2 = ta, tb2 = tb;
  ta2.push_back(0.25);  // N = 15 with ties
  const RankSumResult big = ranksum_test(ta2, tb2);
  CHECK(big.method == RankSumMethod::NormalApprox);
  CHECK(big.tie_correction_applied);
}

TEST_CASE("normal approximation is close to exact past the regime boundary") {
  // N = 21 selects the approximation; subset enumeration is still feasible
  // as the reference, C(21, 10) = 352716 combinations per instance
  Rng rng(504);
  double worst = 0.0;
  for (int rep = 0; rep < 12; ++rep) {
    std::vector<double> a(10), b(11);
    for (double& v : a) v = rng.next_double();
    for (double& v : b) v = rng.next_double() + 0.1;
    const RankSumResult r = ranksum_test(a, b);
    REQUIRE(r.method == RankSumMethod::NormalApprox);
    worst = std::max(worst, std::abs(r.p_two_sided - brute_force_p(a, b)));
  }
  CHECK(worst < 0.015);
}

TEST_CASE("input validation") {
  const std::vector<double> ok{1, 2, 3};
  const std::vector<double> empty;
  CHECK_THROWS_AS(ranksum_test(empty, ok), Error);
  CHECK_THROWS_AS(ranksum_test(ok, empty), Error);
  const std::vector<double> nan{1.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(ranksum_test(ok, nan), Error);
  const std::vector<double> inf{1.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(ranksum_test(inf, ok), Error);
}
