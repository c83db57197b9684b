#include "cortigraph/stats/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cortigraph/common.hpp"

namespace cg {

void CohortFeatures::validate() const {
  band.validate();
  if (subjects.empty()) fail("cohort has no subjects");
  std::set<std::string> classes;
  std::set<std::string> ids;
  for (const auto& s : subjects) {
    if (s.id.empty()) fail("subject with empty id");
    if (!ids.insert(s.id).second) fail("duplicate subject id '%s'", s.id.c_str());
    if (s.class_label.empty()) fail("subject '%s' has empty class label", s.id.c_str());
    classes.insert(s.class_label);
    if (s.hemispheres.empty()) fail("subject '%s' has no hemispheres", s.id.c_str());
    for (const auto& h : s.hemispheres) {
      if (h.global_counts.size() != band.n_bands)
        fail("subject '%s' hemisphere '%s': global histogram has %zu bands, expected %zu",
             s.id.c_str(), h.side.c_str(), h.global_counts.size(),
             static_cast<std::size_t>(band.n_bands));
      if (h.local_counts.empty())
        fail("subject '%s' hemisphere '%s' has no local histograms", s.id.c_str(),
             h.side.c_str());
      for (const auto& lc : h.local_counts)
        if (lc.size() != band.n_bands)
          fail("subject '%s' hemisphere '%s': local histogram has %zu bands, expected %zu",
               s.id.c_str(), h.side.c_str(), lc.size(),
               static_cast<std::size_t>(band.n_bands));
    }
  }
  if (classes.size() != 2)
    fail("cohort must contain exactly 2 classes, found %zu", classes.size());
}

std::vector<double> local_band_sample(const SubjectFeatures& s, std::size_t band) {
  std::vector<double> sample;
  for (const auto& h : s.hemispheres)
    for (const auto& lc : h.local_counts) {
      if (band >= lc.size()) fail("band index %zu out of range", band);
      sample.push_back(static_cast<double>(lc[band]));
    }
  return sample;
}

PairwiseMatrix pairwise_test_matrix(const CohortFeatures& cohort, std::size_t band) {
  cohort.validate();
  if (band >= cohort.n_bands())
    fail("band index %zu out of range (%zu bands)", band, cohort.n_bands());

  const std::size_t n = cohort.subjects.size();
  std::vector<std::vector<double>> samples(n);
  for (std::size_t i = 0; i < n; ++i)
    samples[i] = local_band_sample(cohort.subjects[i], band);

  PairwiseMatrix m;
  m.band = band;
  m.entries.reserve(n * (n - 1) / 2);
  for (std::size_t a = 0; a + 1 < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      PairwiseEntry e;
      e.a = a;
      e.b = b;
      e.same_class = cohort.subjects[a].class_label == cohort.subjects[b].class_label;
      e.p = ranksum_test(samples[a], samples[b]).p_two_sided;
      m.entries.push_back(e);
    }
  return m;
}

namespace {

int percent_round(double frac) {
  return static_cast<int>(std::lround(frac * 100.0));
}

}  // namespace

int SignificantFraction::os_percent() const { return percent_round(os_fraction); }
int SignificantFraction::ss_percent() const { return percent_round(ss_fraction); }

SignificantFraction significant_fraction(const PairwiseMatrix& m, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must lie in (0, 1), got %g", alpha);
  SignificantFraction f;
  for (const auto& e : m.entries) {
    const bool sig = e.p < alpha;
    if (e.same_class) {
      ++f.ss_total;
      if (sig) ++f.ss_significant;
    } else {
      ++f.os_total;
      if (sig) ++f.os_significant;
    }
  }
  if (f.os_total == 0) fail("no opposite-class pairs in matrix");
  if (f.ss_total == 0) fail("no same-class pairs in matrix");
  f.os_fraction = static_cast<double>(f.os_significant) / static_cast<double>(f.os_total);
  f.ss_fraction = static_cast<double>(f.ss_significant) / static_cast<double>(f.ss_total);
  return f;
}

GroupTestResult group_mean_test(const CohortFeatures& cohort) {
  cohort.validate();
  const std::size_t nb = cohort.n_bands();

  std::vector<std::string> classes;
  for (const auto& s : cohort.subjects)
    if (std::find(classes.begin(), classes.end(), s.class_label) == classes.end())
      classes.push_back(s.class_label);
  // validate() guarantees exactly two
  const std::string& ca = classes[0];

  GroupTestResult r;
  r.local_p.resize(nb);
  r.global_p.resize(nb);
  for (std::size_t band = 0; band < nb; ++band) {
    std::vector<double> loc_a, loc_b, glob_a, glob_b;
    for (const auto& s : cohort.subjects) {
      const bool is_a = s.class_label == ca;
      for (const auto& h : s.hemispheres) {
        double sum = 0.0;
        for (const auto& lc : h.local_counts) sum += static_cast<double>(lc[band]);
        const double mean = sum / static_cast<double>(h.local_counts.size());
        (is_a ? loc_a : loc_b).push_back(mean);
        (is_a ? glob_a : glob_b).push_back(static_cast<double>(h.global_counts[band]));
      }
    }
    if (loc_a.size() < 2 || loc_b.size() < 2)
      fail("group test needs at least 2 hemisphere values per class, got %zu and %zu",
           loc_a.size(), loc_b.size());
    r.local_p[band] = ranksum_test(loc_a, loc_b).p_two_sided;
    r.global_p[band] = ranksum_test(glob_a, glob_b).p_two_sided;
  }
  return r;
}

}  // namespace cg
