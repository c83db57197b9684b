#include "cortigraph/spectral/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cortigraph/parallel.hpp"
#include "cortigraph/spectral/factor.hpp"

namespace cg {

namespace {

void axpy(double a, const double* x, double* y, std::size_t n) {
  if (n >= 8192) {
#pragma omp parallel for schedule(static) num_threads(threads())
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) y[i] += a * x[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
  }
}

void scal(double a, double* x, std::size_t n) {
  if (n >= 8192) {
#pragma omp parallel for schedule(static) num_threads(threads())
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) x[i] *= a;
  } else {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
  }
}

void canonicalize_sign(double* v, std::size_t n) {
  std::size_t imax = 0;
  double best = std::abs(v[0]);
  for (std::size_t i = 1; i < n; ++i) {
    double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (v[imax] < 0.0)
    for (std::size_t i = 0; i < n; ++i) v[i] = -v[i];
}

}  // namespace

EigenpairSet smallest_eigenpairs(const SparseSymLaplacian& L, std::size_t k,
                                 const LanczosOptions& opts) {
  std::size_t n = L.n;
  if (n == 0) fail("smallest_eigenpairs: empty operator");
  if (k == 0) fail("smallest_eigenpairs: k must be positive");
  if (k > n) fail("smallest_eigenpairs: k = %zu exceeds n = %zu", k, n);
  if (!(opts.tol > 0.0)) fail("smallest_eigenpairs: tol must be positive");
  if (!(opts.sigma < 0.0))
    fail("smallest_eigenpairs: sigma must be negative to keep L - sigma I definite");

  LaplacianFactor factor(L);
  auto finfo = factor.factorize(opts.sigma);
  if (!finfo.ok || finfo.n_negative > 0)
    fail("smallest_eigenpairs: shifted factorization unstable at sigma = %g", opts.sigma);

  std::size_t max_restarts = opts.max_restarts ? opts.max_restarts : 40 + 10 * k;
  double op_norm = 2.0 - opts.sigma;  // upper bound on ||L - sigma I||_2

  std::vector<double> locked_vecs;  // column-major n x locked
  std::vector<double> locked_vals;
  locked_vecs.reserve(n * k);

  std::size_t m_base = std::clamp<std::size_t>(2 * k + 16, 48, 256);
  std::vector<double> basis;  // column-major n x m
  std::vector<double> w(n), ly(n);
  std::vector<double> alphas, betas, td, te, tz, y;
  int stalls = 0;

  auto orth_against = [&](const std::vector<double>& cols, std::size_t ncols, double* v) {
    for (std::size_t c = 0; c < ncols; ++c) {
      const double* col = cols.data() + c * n;
      double coef = par::dot_blocked(col, v, n);
      axpy(-coef, col, v, n);
    }
  };

  for (std::size_t restart = 0; locked_vals.size() < k; ++restart) {
    if (restart >= max_restarts)
      fail("smallest_eigenpairs: %zu of %zu pairs after %zu restarts (tol %g); "
           "the operator may need a larger restart budget",
           locked_vals.size(), k, max_restarts, opts.tol);

    std::size_t locked = locked_vals.size();
    std::size_t m_max = std::min(n - locked, m_base);
    basis.resize(n * m_max);

    Rng rng(mix_seed(opts.seed, restart));
    for (std::size_t i = 0; i < n; ++i) w[i] = rng.next_double() - 0.5;
    orth_against(locked_vecs, locked, w.data());
    orth_against(locked_vecs, locked, w.data());
    double nrm = std::sqrt(par::dot_blocked(w.data(), w.data(), n));
    if (!(nrm > 1e-12 * std::sqrt(static_cast<double>(n)))) continue;
    scal(1.0 / nrm, w.data(), n);
    std::copy_n(w.begin(), n, basis.begin());

    alphas.clear();
    betas.clear();
    std::size_t m = 0;
    bool do_extract = false;
    for (std::size_t j = 0; j < m_max && !do_extract; ++j) {
      const double* bj = basis.data() + j * n;
      factor.solve(bj, w.data());
      if (j > 0) axpy(-betas[j - 1], basis.data() + (j - 1) * n, w.data(), n);
      double alpha = par::dot_blocked(w.data(), bj, n);
      axpy(-alpha, bj, w.data(), n);
      // Full reorthogonalization, two classical Gram-Schmidt passes against
      // both the locked pairs and the current basis.
      for (int pass = 0; pass < 2; ++pass) {
        orth_against(locked_vecs, locked, w.data());
        orth_against(basis, j + 1, w.data());
      }
      double beta = std::sqrt(par::dot_blocked(w.data(), w.data(), n));
      alphas.push_back(alpha);
      betas.push_back(beta);
      m = j + 1;

      std::size_t need = k - locked;
      bool last_step = j + 1 == m_max;
      bool invariant = beta <= 1e-13;
      if (m >= need || last_step || invariant) {
        td.assign(alphas.begin(), alphas.end());
        te.assign(m, 0.0);
        for (std::size_t i = 1; i < m; ++i) te[i] = betas[i - 1];
        tz.assign(m * m, 0.0);
        for (std::size_t i = 0; i < m; ++i) tz[i + i * m] = 1.0;
        tridiag_eigen(td, te, tz, m);
        std::size_t conv = 0;
        for (std::size_t c = 0; c < std::min(need, m); ++c) {
          std::size_t idx = m - 1 - c;  // largest theta = smallest lambda
          double theta = td[idx];
          if (theta <= 0.0) break;
          double bound = op_norm * beta * std::abs(tz[(m - 1) + idx * m]) / theta;
          if (bound <= 0.5 * opts.tol) ++conv;
        }
        if (conv >= need || last_step || invariant) do_extract = true;
      }
      if (!do_extract && !invariant && beta > 0.0) {
        scal(1.0 / beta, w.data(), n);
        std::copy_n(w.begin(), n, basis.begin() + static_cast<std::ptrdiff_t>((j + 1) * n));
      }
      if (invariant) do_extract = true;
    }

    // Ritz extraction in descending-theta order; lock every candidate whose
    // true residual against L passes.
    std::size_t locked_before = locked_vals.size();
    std::size_t need = k - locked_before;
    y.resize(n);
    for (std::size_t c = 0; c < std::min(need, m); ++c) {
      std::size_t idx = m - 1 - c;
      std::fill(y.begin(), y.end(), 0.0);
      for (std::size_t col = 0; col < m; ++col)
        axpy(tz[col + idx * m], basis.data() + col * n, y.data(), n);
      orth_against(locked_vecs, locked_vals.size(), y.data());
      double ynrm = std::sqrt(par::dot_blocked(y.data(), y.data(), n));
      if (!(ynrm > 1e-8)) continue;
      scal(1.0 / ynrm, y.data(), n);
      laplacian_matvec(L, y.data(), ly.data());
      double lambda = par::dot_blocked(y.data(), ly.data(), n);
      axpy(-lambda, y.data(), ly.data(), n);
      double resid = std::sqrt(par::dot_blocked(ly.data(), ly.data(), n));
      if (resid <= opts.tol) {
        locked_vecs.insert(locked_vecs.end(), y.begin(), y.end());
        locked_vals.push_back(lambda);
        if (locked_vals.size() == k) break;
      }
    }

    if (locked_vals.size() == locked_before) {
      if (++stalls >= 2) {
        m_base = std::min<std::size_t>(std::max(m_base + 16, m_base * 3 / 2), 256);
        stalls = 0;
      }
    } else {
      stalls = 0;
    }
  }

  // Ascending eigenvalue order (locking finds them roughly in order, but
  // restarts over multiplicities can interleave).
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return locked_vals[a] < locked_vals[b];
  });

  EigenpairSet out;
  out.n = n;
  out.k = k;
  out.tolerance = opts.tol;
  out.values.resize(k);
  out.vectors.resize(n * k);
  for (std::size_t j = 0; j < k; ++j) {
    out.values[j] = locked_vals[idx[j]];
    std::copy_n(locked_vecs.begin() + static_cast<std::ptrdiff_t>(idx[j] * n), n,
                out.vectors.begin() + static_cast<std::ptrdiff_t>(j * n));
    canonicalize_sign(out.vec(j), n);
  }
  return out;
}

}  // namespace cg
