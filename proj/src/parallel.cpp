#include "cortigraph/parallel.hpp"

#include <omp.h>

#include <atomic>

namespace cg {

namespace {
std::atomic<int> g_threads{0};
}

void set_threads(int n) {
  g_threads.store(n < 0 ? 0 : n);
  if (n > 0) omp_set_num_threads(n);
}

int threads() {
  int n = g_threads.load();
  return n > 0 ? n : omp_get_max_threads();
}

namespace par {

double sum_blocked(const double* x, std::size_t n) {
  std::size_t nblocks = (n + kBlock - 1) / kBlock;
  if (nblocks <= 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::vector<double> partial(nblocks);
#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    std::size_t hi = lo + kBlock < n ? lo + kBlock : n;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i];
    partial[static_cast<std::size_t>(b)] = s;
  }
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}

double dot_blocked(const double* x, const double* y, std::size_t n) {
  std::size_t nblocks = (n + kBlock - 1) / kBlock;
  if (nblocks <= 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
  }
  std::vector<double> partial(nblocks);
#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    std::size_t hi = lo + kBlock < n ? lo + kBlock : n;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
    partial[static_cast<std::size_t>(b)] = s;
  }
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}

}  // namespace par
}  // namespace cg
