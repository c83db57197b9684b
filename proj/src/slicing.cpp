#include "cortigraph/spectral/slicing.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "cortigraph/spectral/dense_solver.hpp"
#include "cortigraph/spectral/factor.hpp"

namespace cg {

void BandSpec::validate() const {
  if (!(std::isfinite(lo) && std::isfinite(hi)))
    fail("band spec: boundaries must be finite");
  if (!(hi > lo)) fail("band spec: hi (%g) must exceed lo (%g)", hi, lo);
  if (lo < 0.0) fail("band spec: lo (%g) must be nonnegative", lo);
  if (n_bands < 1) fail("band spec: need at least one band");
}

std::vector<double> BandSpec::boundaries() const {
  validate();
  std::vector<double> b(n_bands + 1);
  for (std::size_t k = 0; k <= n_bands; ++k) {
    double t = static_cast<double>(k) / static_cast<double>(n_bands);
    b[k] = lo + t * (hi - lo);
  }
  b[0] = lo;
  b[n_bands] = hi;
  return b;
}

std::uint64_t BandHistogram::total() const {
  std::uint64_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

namespace {

std::size_t sturm_fallback_count(const SparseSymLaplacian& L, double sigma) {
  if (L.n > kSturmFallbackCap)
    fail("eigenvalue count at sigma = %.17g is numerically unstable and the operator "
         "(n = %zu) is too large for the dense fallback",
         sigma, L.n);
  std::size_t n = L.n;
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::uint64_t k = L.offsets[i]; k < L.offsets[i + 1]; ++k)
      a[i + static_cast<std::size_t>(L.cols[k]) * n] = L.values[k];
  std::vector<double> d, e;
  householder_tridiagonalize(a, n, d, e);
  return sturm_count_below(d, e, n, sigma);
}

}  // namespace

std::size_t count_eigenvalues_below(const SparseSymLaplacian& L, LaplacianFactor& factor,
                                    double sigma, SliceStats* stats) {
  if (L.n == 0) fail("count_eigenvalues_below: empty operator");
  if (!std::isfinite(sigma)) fail("count_eigenvalues_below: sigma must be finite");
  if (sigma <= 0.0) return 0;   // spectrum is contained in [0, 2]
  if (sigma > 2.0) return L.n;

  auto info = factor.factorize(sigma);
  if (stats) ++stats->n_factorizations;
  if (info.ok && info.n_tiny == 0) return info.n_negative;

  // Shift collision: retry at a nudged shift.
  if (stats) ++stats->n_perturb_retries;
  auto retry = factor.factorize(sigma + kShiftPerturb);
  if (stats) ++stats->n_factorizations;
  if (retry.ok && retry.n_tiny == 0) return retry.n_negative;

  if (stats) ++stats->n_dense_fallbacks;
  return sturm_fallback_count(L, sigma);
}

std::size_t count_eigenvalues_below(const SparseSymLaplacian& L, double sigma,
                                    SliceStats* stats) {
  if (L.n == 0) fail("count_eigenvalues_below: empty operator");
  if (!std::isfinite(sigma)) fail("count_eigenvalues_below: sigma must be finite");
  if (sigma <= 0.0) return 0;
  if (sigma > 2.0) return L.n;
  LaplacianFactor factor(L);
  return count_eigenvalues_below(L, factor, sigma, stats);
}

BandHistogram band_histogram(const SparseSymLaplacian& L, const BandSpec& spec,
                             SliceStats* stats) {
  spec.validate();
  if (L.n == 0) fail("band_histogram: empty operator");
  std::vector<double> bounds = spec.boundaries();

  LaplacianFactor factor(L);
  std::vector<std::size_t> below(bounds.size());
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    // Closing the last band: count at hi + eps so eigenvalues equal to hi
    // land inside it.
    double sigma = k + 1 == bounds.size() ? bounds[k] + kShiftPerturb : bounds[k];
    below[k] = count_eigenvalues_below(L, factor, sigma, stats);
  }
  for (std::size_t k = 1; k < below.size(); ++k)
    if (below[k] < below[k - 1])
      fail("band_histogram: inconsistent inertia counts between boundaries %zu and %zu",
           k - 1, k);

  BandHistogram h;
  h.spec = spec;
  h.counts.resize(spec.n_bands);
  for (std::size_t k = 0; k < spec.n_bands; ++k)
    h.counts[k] = below[k + 1] - below[k];
  return h;
}

void write_band_histogram_csv(const std::string& path,
                              const std::vector<BandHistogram>& hists) {
  std::ofstream out(path);
  if (!out) fail("cannot write '%s'", path.c_str());
  bool with_per_parcel = false;
  for (const auto& h : hists)
    if (h.per_parcel_divisor > 0.0) with_per_parcel = true;
  out << "graph_id,band_lo,band_hi,count";
  if (with_per_parcel) out << ",count_per_parcel";
  out << '\n';
  for (const auto& h : hists) {
    std::vector<double> bounds = h.spec.boundaries();
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
      out << h.graph_id << ',' << strfmt("%.6g,%.6g,", bounds[k], bounds[k + 1])
          << h.counts[k];
      if (with_per_parcel) {
        if (h.per_parcel_divisor > 0.0)
          out << ',' << strfmt("%.6g", static_cast<double>(h.counts[k]) / h.per_parcel_divisor);
        else
          out << ',';
      }
      out << '\n';
    }
  }
  if (!out) fail("write failed on '%s'", path.c_str());
}

std::vector<BandHistogram> read_band_histogram_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '%s'", path.c_str());
  std::string line;
  if (!std::getline(in, line)) fail("'%s': empty histogram CSV", path.c_str());
  // Collect rows per graph_id in file order.
  std::vector<BandHistogram> out;
  std::map<std::string, std::size_t> index;
  struct Row {
    double lo, hi;
    std::uint64_t count;
  };
  std::vector<std::vector<Row>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id, lo_s, hi_s, count_s, per_parcel_s;
    if (!std::getline(ss, id, ',') || !std::getline(ss, lo_s, ',') ||
        !std::getline(ss, hi_s, ',') || !std::getline(ss, count_s, ','))
      fail("'%s': bad histogram row '%s'", path.c_str(), line.c_str());
    std::getline(ss, per_parcel_s, ',');
    Row r{std::stod(lo_s), std::stod(hi_s),
          static_cast<std::uint64_t>(std::stoull(count_s))};
    auto [it, inserted] = index.try_emplace(id, out.size());
    if (inserted) {
      out.emplace_back();
      out.back().graph_id = id;
      rows.emplace_back();
    }
    if (!per_parcel_s.empty() && r.count > 0 && out[it->second].per_parcel_divisor == 0.0) {
      const double per_parcel = std::stod(per_parcel_s);
      if (per_parcel > 0.0)
        out[it->second].per_parcel_divisor = static_cast<double>(r.count) / per_parcel;
    }
    rows[it->second].push_back(r);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (rows[i].empty()) fail("'%s': histogram with no rows", path.c_str());
    out[i].spec.lo = rows[i].front().lo;
    out[i].spec.hi = rows[i].back().hi;
    out[i].spec.n_bands = rows[i].size();
    for (const Row& r : rows[i]) out[i].counts.push_back(r.count);
  }
  return out;
}

}  // namespace cg
