#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace cg {

// Global worker-thread count. 0 means "use OpenMP default". Every parallel
// region in the library reads this instead of the raw OMP setting so the CLI
// --threads flag has one switch to flip.
void set_threads(int n);
int threads();

namespace par {

// Deterministic reductions: inputs are cut into fixed-size blocks, block
// sums are accumulated serially in index order, and blocks are processed in
// parallel. The result is bitwise identical for any thread count because
// the floating-point combination order never changes.
inline constexpr std::size_t kBlock = 4096;

double sum_blocked(const double* x, std::size_t n);
double dot_blocked(const double* x, const double* y, std::size_t n);

inline double sum_blocked(const std::vector<double>& x) {
  return sum_blocked(x.data(), x.size());
}
inline double dot_blocked(const std::vector<double>& x, const std::vector<double>& y) {
  return dot_blocked(x.data(), y.data(), x.size());
}

}  // namespace par
}  // namespace cg
