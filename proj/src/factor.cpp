#include "cortigraph/spectral/factor.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

namespace cg {

namespace {
using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
}

struct LaplacianFactor::Impl {
  std::size_t n = 0;
  std::vector<int> perm;            // perm[old] = new position
  SpMat mat;                        // permuted L (full symmetric pattern)
  std::vector<std::size_t> diag_slot;  // per new index, offset into valuePtr()
  std::vector<double> diag_base;       // unshifted diagonal per new index
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::NaturalOrdering<int>> ldlt;
  bool analyzed = false;
  bool factorized = false;
  mutable Eigen::VectorXd pb, px;
};

LaplacianFactor::LaplacianFactor(const SparseSymLaplacian& L)
    : impl_(std::make_unique<Impl>()) {
  Impl& im = *impl_;
  std::size_t n = L.n;
  im.n = n;
  if (n == 0) fail("LaplacianFactor: empty operator");
  if (n > static_cast<std::size_t>(std::numeric_limits<int>::max()))
    fail("LaplacianFactor: operator too large for 32-bit indexing");

  im.perm.resize(n);
  if (L.nd_order.size() == n) {
    for (std::size_t k = 0; k < n; ++k) im.perm[L.nd_order[k]] = static_cast<int>(k);
  } else {
    // No geometric order available: fall back to AMD on the pattern.
    SpMat plain(static_cast<int>(n), static_cast<int>(n));
    {
      std::vector<Eigen::Triplet<double>> trips;
      trips.reserve(L.nnz());
      for (std::size_t i = 0; i < n; ++i)
        for (std::uint64_t kk = L.offsets[i]; kk < L.offsets[i + 1]; ++kk)
          trips.emplace_back(static_cast<int>(i), static_cast<int>(L.cols[kk]),
                             L.values[kk]);
      plain.setFromTriplets(trips.begin(), trips.end());
    }
    Eigen::AMDOrdering<int> amd;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> P;
    amd(plain.selfadjointView<Eigen::Lower>(), P);
    for (std::size_t i = 0; i < n; ++i) im.perm[i] = P.indices()(static_cast<int>(i));
  }

  // Build the permuted matrix in CSC directly; columns then need a sort by
  // row index. Any symmetric permutation preserves inertia, so correctness
  // never depends on the order, only factorization fill does.
  std::size_t nnz = L.nnz();
  im.mat.resize(static_cast<int>(n), static_cast<int>(n));
  im.mat.makeCompressed();
  im.mat.resizeNonZeros(static_cast<Eigen::Index>(nnz));
  int* outer = im.mat.outerIndexPtr();
  int* inner = im.mat.innerIndexPtr();
  double* vals = im.mat.valuePtr();

  std::vector<std::uint64_t> col_size(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    col_size[static_cast<std::size_t>(im.perm[i])] = L.offsets[i + 1] - L.offsets[i];
  outer[0] = 0;
  for (std::size_t j = 0; j < n; ++j)
    outer[j + 1] = outer[j] + static_cast<int>(col_size[j]);

  std::vector<int> cursor(outer, outer + n);
  for (std::size_t i = 0; i < n; ++i) {
    int cj = im.perm[i];
    for (std::uint64_t kk = L.offsets[i]; kk < L.offsets[i + 1]; ++kk) {
      int at = cursor[static_cast<std::size_t>(cj)]++;
      inner[at] = im.perm[L.cols[kk]];
      vals[at] = L.values[kk];
    }
  }
  std::vector<std::pair<int, double>> tmp;
  im.diag_slot.resize(n);
  im.diag_base.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    int lo = outer[j], hi = outer[j + 1];
    tmp.assign(static_cast<std::size_t>(hi - lo), {});
    for (int t = lo; t < hi; ++t) tmp[static_cast<std::size_t>(t - lo)] = {inner[t], vals[t]};
    std::sort(tmp.begin(), tmp.end());
    for (int t = lo; t < hi; ++t) {
      inner[t] = tmp[static_cast<std::size_t>(t - lo)].first;
      vals[t] = tmp[static_cast<std::size_t>(t - lo)].second;
      if (inner[t] == static_cast<int>(j)) {
        im.diag_slot[j] = static_cast<std::size_t>(t);
        im.diag_base[j] = vals[t];
      }
    }
  }
}

LaplacianFactor::~LaplacianFactor() = default;

std::size_t LaplacianFactor::n() const { return impl_->n; }

LaplacianFactor::Info LaplacianFactor::factorize(double sigma) {
  Impl& im = *impl_;
  double* vals = im.mat.valuePtr();
  for (std::size_t j = 0; j < im.n; ++j)
    vals[im.diag_slot[j]] = im.diag_base[j] - sigma;

  if (!im.analyzed) {
    im.ldlt.analyzePattern(im.mat);
    if (im.ldlt.info() != Eigen::Success)
      fail("LaplacianFactor: symbolic analysis failed");
    im.analyzed = true;
  }
  im.ldlt.factorize(im.mat);

  Info info;
  info.sigma = sigma;
  if (im.ldlt.info() != Eigen::Success) {
    info.ok = false;
    im.factorized = false;
    return info;
  }
  const auto& D = im.ldlt.vectorD();
  info.ok = true;
  info.min_abs_pivot = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < D.size(); ++i) {
    double d = D(i);
    if (!std::isfinite(d)) {
      info.ok = false;
      break;
    }
    if (d < 0.0) ++info.n_negative;
    double ad = std::abs(d);
    if (ad < kTinyPivot) ++info.n_tiny;
    info.min_abs_pivot = std::min(info.min_abs_pivot, ad);
  }
  im.factorized = info.ok;
  return info;
}

void LaplacianFactor::solve(const double* b, double* x) const {
  Impl& im = *impl_;
  if (!im.factorized) fail("LaplacianFactor::solve before a successful factorize");
  im.pb.resize(static_cast<Eigen::Index>(im.n));
  for (std::size_t i = 0; i < im.n; ++i) im.pb(im.perm[i]) = b[i];
  im.px = im.ldlt.solve(im.pb);
  for (std::size_t i = 0; i < im.n; ++i) x[i] = im.px(im.perm[i]);
}

}  // namespace cg
