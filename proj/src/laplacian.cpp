#include "cortigraph/laplacian.hpp"

#include <cmath>

#include "cortigraph/ordering.hpp"
#include "cortigraph/parallel.hpp"

namespace cg {

SparseSymLaplacian normalized_laplacian(const VoxelGraph& g) {
  std::size_t n = g.n_vertices();
  SparseSymLaplacian L;
  L.n = n;
  L.degree.resize(n);
  L.offsets.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    L.degree[v] = static_cast<std::uint32_t>(g.degree(v));
    L.offsets[v + 1] = L.offsets[v] + g.degree(v) + 1;  // +1 for the diagonal
  }
  L.cols.resize(L.offsets[n]);
  L.values.resize(L.offsets[n]);

  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t v = 0; v < n; ++v)
    inv_sqrt_deg[v] = L.degree[v] > 0 ? 1.0 / std::sqrt(static_cast<double>(L.degree[v])) : 0.0;

#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t vi = 0; vi < static_cast<std::ptrdiff_t>(n); ++vi) {
    auto v = static_cast<std::uint32_t>(vi);
    std::uint64_t at = L.offsets[v];
    bool diag_written = false;
    for (std::uint32_t nb : g.row(v)) {
      if (!diag_written && nb > v) {
        L.cols[at] = v;
        L.values[at] = L.degree[v] > 0 ? 1.0 : 0.0;
        ++at;
        diag_written = true;
      }
      L.cols[at] = nb;
      L.values[at] = -inv_sqrt_deg[v] * inv_sqrt_deg[nb];
      ++at;
    }
    if (!diag_written) {
      L.cols[at] = v;
      L.values[at] = L.degree[v] > 0 ? 1.0 : 0.0;
    }
  }

  L.nd_order = nested_dissection_order(g);
  return L;
}

void laplacian_matvec(const SparseSymLaplacian& L, const double* x, double* y) {
#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(L.n); ++i) {
    double s = 0.0;
    for (std::uint64_t k = L.offsets[static_cast<std::size_t>(i)];
         k < L.offsets[static_cast<std::size_t>(i) + 1]; ++k)
      s += L.values[k] * x[L.cols[k]];
    y[i] = s;
  }
}

void laplacian_matvec_serial(const SparseSymLaplacian& L, const double* x, double* y) {
  for (std::size_t i = 0; i < L.n; ++i) {
    double s = 0.0;
    for (std::uint64_t k = L.offsets[i]; k < L.offsets[i + 1]; ++k)
      s += L.values[k] * x[L.cols[k]];
    y[i] = s;
  }
}

}  // namespace cg
