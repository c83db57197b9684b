#include "cortigraph/spectral/dense_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cg {

void householder_tridiagonalize(std::vector<double>& a, std::size_t n,
                                std::vector<double>& d, std::vector<double>& e) {
  if (a.size() != n * n) fail("householder_tridiagonalize: matrix size mismatch");
  auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i + j * n]; };
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  if (n == 0) return;

  for (std::size_t i = n - 1; i >= 1; --i) {
    std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(A(i, k));
      if (scale == 0.0) {
        e[i] = A(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          A(i, k) /= scale;
          h += A(i, k) * A(i, k);
        }
        double f = A(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        A(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          A(j, i) = A(i, j) / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += A(j, k) * A(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += A(k, j) * A(i, k);
          e[j] = g / h;
          f += e[j] * A(i, j);
        }
        double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = A(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k) A(j, k) -= f * e[k] + g * A(i, k);
        }
      }
    } else {
      e[i] = A(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      for (std::size_t j = 0; j < i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k < i; ++k) g += A(i, k) * A(k, j);
        for (std::size_t k = 0; k < i; ++k) A(k, j) -= g * A(k, i);
      }
    }
    d[i] = A(i, i);
    A(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) A(j, i) = A(i, j) = 0.0;
  }
}

void tridiag_eigen(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z,
                   std::size_t n) {
  if (n == 0) return;
  if (d.size() < n || e.size() < n || z.size() != n * n)
    fail("tridiag_eigen: input size mismatch");
  auto Z = [&](std::size_t i, std::size_t j) -> double& { return z[i + j * n]; };
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) fail("tridiag_eigen: QL failed to converge at row %zu", l);
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(m) - 1;
             i >= static_cast<std::ptrdiff_t>(l); --i) {
          auto iu = static_cast<std::size_t>(i);
          double f = s * e[iu];
          double b = c * e[iu];
          r = std::hypot(f, g);
          e[iu + 1] = r;
          if (r == 0.0) {
            d[iu + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[iu + 1] - p;
          r = (d[iu] - g) * s + 2.0 * c * b;
          p = s * r;
          d[iu + 1] = g + p;
          g = c * r - b;
          for (std::size_t k = 0; k < n; ++k) {
            f = Z(k, iu + 1);
            Z(k, iu + 1) = s * Z(k, iu) + c * f;
            Z(k, iu) = c * Z(k, iu) - s * f;
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }

  // Ascending eigenvalue order with matching column permutation.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  std::vector<double> d_sorted(n);
  std::vector<double> z_sorted(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    d_sorted[j] = d[idx[j]];
    std::copy_n(z.begin() + static_cast<std::ptrdiff_t>(idx[j] * n), n,
                z_sorted.begin() + static_cast<std::ptrdiff_t>(j * n));
  }
  d.assign(d_sorted.begin(), d_sorted.end());
  z.swap(z_sorted);
}

std::size_t sturm_count_below(const std::vector<double>& d, const std::vector<double>& e,
                              std::size_t n, double sigma) {
  // LDL^T sign count on the tridiagonal; e follows the
  // householder_tridiagonalize convention (e[i] couples i-1 and i).
  std::size_t count = 0;
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double off = i == 0 ? 0.0 : e[i];
    double prev = t;
    t = d[i] - sigma;
    if (i > 0) {
      if (prev == 0.0) prev = std::numeric_limits<double>::denorm_min();
      t -= off * off / prev;
    }
    if (t < 0.0) ++count;
    if (t == 0.0) t = std::numeric_limits<double>::denorm_min();
  }
  return count;
}

EigenpairSet dense_spectrum(const SparseSymLaplacian& L, std::size_t cap) {
  if (L.n == 0) fail("dense_spectrum: empty operator");
  if (L.n > cap)
    fail("dense_spectrum: n = %zu exceeds cap %zu; use the sparse paths", L.n, cap);
  std::size_t n = L.n;
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::uint64_t k = L.offsets[i]; k < L.offsets[i + 1]; ++k)
      a[i + static_cast<std::size_t>(L.cols[k]) * n] = L.values[k];

  std::vector<double> d, e;
  householder_tridiagonalize(a, n, d, e);
  tridiag_eigen(d, e, a, n);

  EigenpairSet out;
  out.n = n;
  out.k = n;
  out.values = std::move(d);
  out.vectors = std::move(a);
  out.tolerance = 1e-12;
  return out;
}

}  // namespace cg
