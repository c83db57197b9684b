#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <string>
#include <vector>

#include "cortigraph/common.hpp"
#include "cortigraph/stats/cohort.hpp"

using namespace cg;

namespace {

SubjectFeatures::Hemisphere hemi(const std::string& side,
                                 std::vector<std::vector<std::uint64_t>> locals) {
  SubjectFeatures::Hemisphere h;
  h.side = side;
  h.n_vertices = 100;
  h.n_components = 1;
  h.global_counts.assign(locals.front().size(), 0);
  for (const auto& l : locals)
    for (std::size_t k = 0; k < l.size(); ++k) h.global_counts[k] += l[k];
  h.local_counts = std::move(locals);
  return h;
}

// Cohort with constant local counts `base` per parcel; class B gets
// `base + bump` in band 0.
CohortFeatures uniform_cohort(std::size_t per_class, std::uint64_t base,
                              std::uint64_t bump, std::uint64_t jitter_seed = 0) {
  CohortFeatures c;
  c.band = BandSpec{0.0, 0.1, 3};
  Rng rng(jitter_seed == 0 ? 1 : jitter_seed);
  for (std::size_t cls = 0; cls < 2; ++cls)
    for (std::size_t i = 0; i < per_class; ++i) {
      SubjectFeatures s;
      s.id = strfmt("%c%02zu", cls == 0 ? 'F' : 'M', i + 1);
      s.class_label = cls == 0 ? "F" : "M";
      const std::uint64_t b0 = base + (cls == 1 ? bump : 0);
      std::vector<std::vector<std::uint64_t>> locals;
      for (int parcel = 0; parcel < 4; ++parcel) {
        std::uint64_t wiggle =
            jitter_seed ? static_cast<std::uint64_t>(rng.next_double() * 2) : 0;
        locals.push_back({b0 + wiggle, base, base});
      }
      s.hemispheres.push_back(hemi("L", locals));
      s.hemispheres.push_back(hemi("R", locals));
      c.subjects.push_back(std::move(s));
    }
  return c;
}

}  // namespace

TEST_CASE("pair bookkeeping for fifteen versus fifteen") {
  const CohortFeatures c = uniform_cohort(15, 4, 0);
  c.validate();
  const PairwiseMatrix m = pairwise_test_matrix(c, 0);
  CHECK(m.entries.size() == 30 * 29 / 2);

  const SignificantFraction f = significant_fraction(m, 0.05);
  CHECK(f.os_total == 225);  // 15 * 15
  CHECK(f.ss_total == 210);  // 2 * C(15,2)
  CHECK(f.os_total + f.ss_total == m.entries.size());

  // pairs are lexicographic with a < b
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    CHECK(m.entries[i].a < m.entries[i].b);
    if (i > 0) {
      const bool ordered = m.entries[i - 1].a < m.entries[i].a ||
                           (m.entries[i - 1].a == m.entries[i].a &&
                            m.entries[i - 1].b < m.entries[i].b);
      CHECK(ordered);
    }
  }
}

TEST_CASE("identical subjects produce p = 1 and no significance") {
  const CohortFeatures c = uniform_cohort(5, 7, 0);
  for (std::size_t band = 0; band < c.n_bands(); ++band) {
    const PairwiseMatrix m = pairwise_test_matrix(c, band);
    for (const auto& e : m.entries) CHECK(e.p == doctest::Approx(1.0));
    const SignificantFraction f = significant_fraction(m, 0.05);
    CHECK(f.os_significant == 0);
    CHECK(f.ss_significant == 0);
    CHECK(f.os_fraction == 0.0);
    CHECK(f.ss_fraction == 0.0);
  }
}

TEST_CASE("fully separated classes light up the shifted band only") {
  // 8 parcels per subject pooled over two hemispheres, counts 2 vs 9 in
  // band 0: every opposite-class pair is maximally significant there
  const CohortFeatures c = uniform_cohort(4, 2, 7);
  const PairwiseMatrix m0 = pairwise_test_matrix(c, 0);
  const SignificantFraction f0 = significant_fraction(m0, 0.05);
  CHECK(f0.os_fraction == doctest::Approx(1.0));
  CHECK(f0.ss_fraction == doctest::Approx(0.0));
  CHECK(f0.os_percent() == 100);
  CHECK(f0.ss_percent() == 0);

  // untouched band: nothing significant anywhere
  const SignificantFraction f1 = significant_fraction(pairwise_test_matrix(c, 1), 0.05);
  CHECK(f1.os_significant == 0);
  CHECK(f1.ss_significant == 0);
}

TEST_CASE("local band sample pools hemispheres") {
  const CohortFeatures c = uniform_cohort(2, 3, 1);
  const std::vector<double> sample = local_band_sample(c.subjects[0], 0);
  CHECK(sample.size() == 8);  // 4 parcels x 2 hemispheres
  for (double v : sample) CHECK(v == doctest::Approx(3.0));
}

TEST_CASE("percent rounding goes half away from zero") {
  PairwiseMatrix m;
  m.band = 0;
  // 8 OS pairs, 1 significant = 12.5% -> 13; 8 SS pairs, 3 significant
  // = 37.5% -> 38
  for (int i = 0; i < 8; ++i) {
    PairwiseEntry os;
    os.a = 0;
    os.b = static_cast<std::size_t>(i) + 1;
    os.same_class = false;
    os.p = i == 0 ? 0.01 : 0.5;
    m.entries.push_back(os);
    PairwiseEntry ss;
    ss.a = 10;
    ss.b = static_cast<std::size_t>(i) + 11;
    ss.same_class = true;
    ss.p = i < 3 ? 0.01 : 0.5;
    m.entries.push_back(ss);
  }
  const SignificantFraction f = significant_fraction(m, 0.05);
  CHECK(f.os_percent() == 13);
  CHECK(f.ss_percent() == 38);
}

TEST_CASE("group test pools two values per subject") {
  CohortFeatures c = uniform_cohort(6, 3, 4, 99);
  const GroupTestResult g = group_mean_test(c);
  REQUIRE(g.local_p.size() == c.n_bands());
  REQUIRE(g.global_p.size() == c.n_bands());

  // band 0 separates the classes by +4 with jitter < 2: p should be tiny
  CHECK(g.local_p[0] < 0.01);
  CHECK(g.global_p[0] < 0.01);
  // band 2 is identical everywhere
  CHECK(g.local_p[2] == doctest::Approx(1.0));
  for (double p : g.local_p) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("validation rejects malformed cohorts") {
  CohortFeatures one = uniform_cohort(3, 2, 0);
  for (auto& s : one.subjects) s.class_label = "F";  // single class
  CHECK_THROWS_AS(one.validate(), Error);

  CohortFeatures dup = uniform_cohort(3, 2, 0);
  dup.subjects[1].id = dup.subjects[0].id;
  CHECK_THROWS_AS(dup.validate(), Error);

  CohortFeatures nolocal = uniform_cohort(3, 2, 0);
  nolocal.subjects[0].hemispheres[0].local_counts.clear();
  CHECK_THROWS_AS(nolocal.validate(), Error);

  CohortFeatures badlen = uniform_cohort(3, 2, 0);
  badlen.subjects[0].hemispheres[0].global_counts.pop_back();
  CHECK_THROWS_AS(badlen.validate(), Error);

  CohortFeatures empty;
  empty.band = BandSpec{0.0, 0.1, 3};
  CHECK_THROWS_AS(empty.validate(), Error);

  // alpha outside (0, 1)
  const PairwiseMatrix m = pairwise_test_matrix(uniform_cohort(2, 2, 0), 0);
  CHECK_THROWS_AS(significant_fraction(m, 0.0), Error);
  CHECK_THROWS_AS(significant_fraction(m, 1.0), Error);

  // band index out of range
  CHECK_THROWS_AS(pairwise_test_matrix(uniform_cohort(2, 2, 0), 3), Error);
}

TEST_CASE("single subject per class fails the group test") {
  CohortFeatures c = uniform_cohort(2, 3, 1);
  c.subjects.erase(c.subjects.begin() + 1);  // one F, two M
  c.subjects.erase(c.subjects.begin() + 1);  // one F, one M
  // each class pools 2 values (both hemispheres of its single subject), so
  // the group test still runs; shrink to one hemisphere to break it
  c.subjects[0].hemispheres.pop_back();
  c.subjects[1].hemispheres.pop_back();
  CHECK_THROWS_AS(group_mean_test(c), Error);
}
