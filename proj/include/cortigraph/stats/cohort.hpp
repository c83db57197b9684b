#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cortigraph/spectral/slicing.hpp"
#include "cortigraph/stats/ranksum.hpp"

namespace cg {

// Spectral feature sets extracted from one subject: per hemisphere, the
// global band histogram and one histogram per parcel of the local graphs.
struct SubjectFeatures {
  std::string id;
  std::string class_label;
  struct Hemisphere {
    std::string side;  // "L" / "R" (or a single pseudo-hemisphere)
    std::size_t n_vertices = 0;
    std::uint32_t n_components = 0;
    std::vector<std::uint64_t> global_counts;              // per band
    std::vector<std::vector<std::uint64_t>> local_counts;  // [parcel][band]
  };
  std::vector<Hemisphere> hemispheres;
};

struct CohortFeatures {
  BandSpec band;
  std::vector<SubjectFeatures> subjects;

  std::size_t n_bands() const { return band.n_bands; }
  // Structural checks: consistent band counts, at least one hemisphere per
  // subject, at least one local histogram per hemisphere, exactly two
  // distinct class labels.
  void validate() const;
};

// Per-subject sample for one band: the band's eigenvalue counts of every
// local graph across all hemispheres.
std::vector<double> local_band_sample(const SubjectFeatures& s, std::size_t band);

struct PairwiseEntry {
  std::size_t a = 0, b = 0;  // subject indices, a < b
  bool same_class = false;
  double p = 1.0;
};

struct PairwiseMatrix {
  std::size_t band = 0;
  std::vector<PairwiseEntry> entries;  // every unordered pair, lexicographic
};

// Rank-sum test between the local-count samples of every subject pair, for
// one band.
PairwiseMatrix pairwise_test_matrix(const CohortFeatures& cohort, std::size_t band);

struct SignificantFraction {
  std::uint64_t os_significant = 0, os_total = 0;  // opposite-class pairs
  std::uint64_t ss_significant = 0, ss_total = 0;  // same-class pairs
  double os_fraction = 0.0, ss_fraction = 0.0;

  int os_percent() const;  // rounded half away from zero
  int ss_percent() const;
};

// Fraction of pairs with p < alpha, split by class parity.
SignificantFraction significant_fraction(const PairwiseMatrix& m, double alpha);

struct GroupTestResult {
  std::vector<double> local_p;   // per band
  std::vector<double> global_p;  // per band
};

// Class-versus-class rank-sum per band. Each hemisphere contributes one
// value per subject and band: the mean local count over its parcels (local
// route) or its global count (global route), so a subject adds two values
// to its class sample.
GroupTestResult group_mean_test(const CohortFeatures& cohort);

}  // namespace cg
