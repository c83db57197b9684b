#include "cortigraph/parcellation/kmeans.hpp"

#include <algorithm>
#include <cmath>

#include "cortigraph/parallel.hpp"

namespace cg {

namespace {

double dist2(const double* a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

struct Assignment {
  std::uint32_t label;
  double upper;  // exact distance to the assigned center
  double lower;  // exact distance to the second-closest center
};

Assignment scan_all_centers(const double* x, const std::vector<double>& centers,
                            std::size_t k, std::size_t dim) {
  double best = std::numeric_limits<double>::infinity();
  double second = best;
  std::uint32_t bi = 0;
  for (std::size_t c = 0; c < k; ++c) {
    double d = dist2(x, centers.data() + c * dim, dim);
    if (d < best) {
      second = best;
      best = d;
      bi = static_cast<std::uint32_t>(c);
    } else if (d < second) {
      second = d;
    }
  }
  return {bi, std::sqrt(best), std::sqrt(second)};
}

void kmeanspp_init(const Embedding& P, std::size_t k, Rng& rng,
                   std::vector<double>& centers) {
  std::size_t n = P.n, dim = P.dim;
  centers.assign(k * dim, 0.0);
  std::size_t first = static_cast<std::size_t>(rng.next_below(n));
  std::copy_n(P.row(first), dim, centers.begin());

  std::vector<double> d2(n);
#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t x = 0; x < static_cast<std::ptrdiff_t>(n); ++x)
    d2[static_cast<std::size_t>(x)] =
        dist2(P.row(static_cast<std::size_t>(x)), centers.data(), dim);

  for (std::size_t j = 1; j < k; ++j) {
    double total = par::sum_blocked(d2);
    if (!(total > 0.0))
      fail("kmeans: k = %zu exceeds the number of distinct points", k);
    double r = rng.next_double() * total;
    double cum = 0.0;
    std::size_t pick = n;
    std::size_t last_positive = n;
    for (std::size_t x = 0; x < n; ++x) {
      if (d2[x] > 0.0) {
        last_positive = x;
        cum += d2[x];
        if (cum > r) {
          pick = x;
          break;
        }
      }
    }
    if (pick == n) pick = last_positive;  // r rounded up to the total
    const double* px = P.row(pick);
    std::copy_n(px, dim, centers.begin() + static_cast<std::ptrdiff_t>(j * dim));
#pragma omp parallel for schedule(static) num_threads(threads())
    for (std::ptrdiff_t x = 0; x < static_cast<std::ptrdiff_t>(n); ++x) {
      auto xi = static_cast<std::size_t>(x);
      d2[xi] = std::min(d2[xi], dist2(P.row(xi), px, dim));
    }
  }
}

struct Run {
  std::vector<std::uint32_t> labels;
  std::vector<double> centers;
  std::vector<std::uint64_t> sizes;
  double wcss = 0.0;
  std::vector<double> history;
};

double measure_wcss(const Embedding& P, const std::vector<std::uint32_t>& labels,
                    const std::vector<double>& centers, std::vector<double>& scratch) {
  std::size_t n = P.n, dim = P.dim;
  scratch.resize(n);
#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t x = 0; x < static_cast<std::ptrdiff_t>(n); ++x) {
    auto xi = static_cast<std::size_t>(x);
    scratch[xi] = dist2(P.row(xi), centers.data() + labels[xi] * dim, dim);
  }
  return par::sum_blocked(scratch);
}

Run run_once(const Embedding& P, std::size_t k, std::uint64_t run_seed,
             const KMeansOptions& opts, bool hamerly) {
  std::size_t n = P.n, dim = P.dim;
  Rng rng(run_seed);
  Run run;
  kmeanspp_init(P, k, rng, run.centers);

  run.labels.assign(n, 0);
  std::vector<double> upper(n), lower(n);
#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t x = 0; x < static_cast<std::ptrdiff_t>(n); ++x) {
    auto xi = static_cast<std::size_t>(x);
    Assignment a = scan_all_centers(P.row(xi), run.centers, k, dim);
    run.labels[xi] = a.label;
    upper[xi] = a.upper;
    lower[xi] = a.lower;
  }

  std::vector<double> scratch;
  run.history.push_back(measure_wcss(P, run.labels, run.centers, scratch));

  std::vector<double> sums(k * dim);
  std::vector<std::uint64_t> counts(k);
  std::vector<double> new_centers(k * dim), deltas(k), sep(k);
  std::vector<double> exact_d;
  bool bounds_stale = false;

  for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
    // Mean update; the accumulation is serial in point order so the result
    // does not depend on the thread count.
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t x = 0; x < n; ++x) {
      const double* px = P.row(x);
      double* s = sums.data() + run.labels[x] * dim;
      for (std::size_t j = 0; j < dim; ++j) s[j] += px[j];
      ++counts[run.labels[x]];
    }
    new_centers = run.centers;
    for (std::size_t c = 0; c < k; ++c)
      if (counts[c] > 0)
        for (std::size_t j = 0; j < dim; ++j)
          new_centers[c * dim + j] = sums[c * dim + j] / static_cast<double>(counts[c]);

    // Reseed empty clusters at the point farthest from its own center.
    bool reseeded = false;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      if (!reseeded) {
        exact_d.resize(n);
#pragma omp parallel for schedule(static) num_threads(threads())
        for (std::ptrdiff_t x = 0; x < static_cast<std::ptrdiff_t>(n); ++x) {
          auto xi = static_cast<std::size_t>(x);
          exact_d[xi] = dist2(P.row(xi), new_centers.data() + run.labels[xi] * dim, dim);
        }
      }
      std::size_t far = 0;
      for (std::size_t x = 1; x < n; ++x)
        if (exact_d[x] > exact_d[far]) far = x;
      std::copy_n(P.row(far), dim, new_centers.begin() + static_cast<std::ptrdiff_t>(c * dim));
      exact_d[far] = -1.0;  // not eligible for the next empty cluster
      reseeded = true;
    }

    double delta_max = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      deltas[c] = std::sqrt(dist2(run.centers.data() + c * dim,
                                  new_centers.data() + c * dim, dim));
      delta_max = std::max(delta_max, deltas[c]);
    }
    run.centers = new_centers;
    if (reseeded) bounds_stale = true;

    long long changed = 0;
    if (!hamerly || bounds_stale) {
#pragma omp parallel for schedule(static) num_threads(threads()) reduction(+ : changed)
      for (std::ptrdiff_t x = 0; x < static_cast<std::ptrdiff_t>(n); ++x) {
        auto xi = static_cast<std::size_t>(x);
        Assignment a = scan_all_centers(P.row(xi), run.centers, k, dim);
        if (a.label != run.labels[xi]) ++changed;
        run.labels[xi] = a.label;
        upper[xi] = a.upper;
        lower[xi] = a.lower;
      }
      bounds_stale = false;
    } else {
      // Hamerly bounds: u grows by the movement of the assigned center, l
      // shrinks by the largest movement; points whose upper bound stays
      // under max(s, l) cannot change assignment and are skipped.
      for (std::size_t c = 0; c < k; ++c) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t c2 = 0; c2 < k; ++c2)
          if (c2 != c)
            m = std::min(m, dist2(run.centers.data() + c * dim,
                                  run.centers.data() + c2 * dim, dim));
        sep[c] = 0.5 * std::sqrt(m);
      }
#pragma omp parallel for schedule(static) num_threads(threads()) reduction(+ : changed)
      for (std::ptrdiff_t x = 0; x < static_cast<std::ptrdiff_t>(n); ++x) {
        auto xi = static_cast<std::size_t>(x);
        upper[xi] += deltas[run.labels[xi]];
        lower[xi] -= delta_max;
        double bound = std::max(sep[run.labels[xi]], lower[xi]);
        if (upper[xi] <= bound) continue;
        upper[xi] = std::sqrt(
            dist2(P.row(xi), run.centers.data() + run.labels[xi] * dim, dim));
        if (upper[xi] <= bound) continue;
        Assignment a = scan_all_centers(P.row(xi), run.centers, k, dim);
        if (a.label != run.labels[xi]) ++changed;
        run.labels[xi] = a.label;
        upper[xi] = a.upper;
        lower[xi] = a.lower;
      }
    }

    run.history.push_back(measure_wcss(P, run.labels, run.centers, scratch));
    if (changed == 0 && !reseeded) break;
  }

  run.wcss = run.history.back();
  run.sizes.assign(k, 0);
  for (std::uint32_t l : run.labels) ++run.sizes[l];
  return run;
}

KMeansResult cluster_impl(const Embedding& P, std::size_t k, std::uint64_t seed,
                          const KMeansOptions& opts, bool hamerly) {
  if (P.n == 0 || P.dim == 0) fail("kmeans: empty point set");
  if (k == 0) fail("kmeans: k must be positive");
  if (k > P.n) fail("kmeans: k = %zu exceeds n = %zu", k, P.n);
  if (opts.restarts == 0) fail("kmeans: need at least one restart");

  KMeansResult best;
  bool have = false;
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    Run run = run_once(P, k, mix_seed(seed, r), opts, hamerly);
    if (!have || run.wcss < best.wcss) {
      best.labels = std::move(run.labels);
      best.centers = std::move(run.centers);
      best.sizes = std::move(run.sizes);
      best.wcss = run.wcss;
      best.wcss_history = std::move(run.history);
      best.winning_restart = r;
      have = true;
    }
  }
  best.n_iterations = best.wcss_history.size() - 1;
  return best;
}

}  // namespace

KMeansResult kmeans_cluster(const Embedding& points, std::size_t k, std::uint64_t seed,
                            const KMeansOptions& opts) {
  return cluster_impl(points, k, seed, opts, true);
}

KMeansResult kmeans_cluster_reference(const Embedding& points, std::size_t k,
                                      std::uint64_t seed, const KMeansOptions& opts) {
  return cluster_impl(points, k, seed, opts, false);
}

}  // namespace cg
