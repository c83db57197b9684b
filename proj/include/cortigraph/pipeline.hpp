#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cortigraph/spectral/slicing.hpp"
#include "cortigraph/stats/cohort.hpp"

namespace cg {

struct PipelineConfig {
  std::string manifest_path;
  std::string out_dir;
  int connectivity = 26;
  std::vector<std::uint32_t> target_sizes = {5000, 6000, 7000, 8000, 9000, 10000};
  BandSpec band;
  std::uint64_t seed = 42;
  std::uint32_t kmeans_restarts = 10;
  double alpha = 0.05;
  int threads = 0;           // 0 keeps the current setting
  bool exclude_zero = false; // subtract component count from band 1
  bool row_normalize = false;
  bool cache = true;
  std::string cache_dir;     // empty: CORTIGRAPH_CACHE_DIR, else <out_dir>/cache

  void validate() const;
};

// JSON config file; unknown keys are rejected. Relative manifest paths are
// resolved against the config file's directory.
PipelineConfig load_pipeline_config(const std::string& path);

struct ManifestSubject {
  std::string id;
  std::string class_label;
  std::vector<std::string> mask_paths;     // one per hemisphere, 1 or more
  std::vector<std::string> surface_paths;  // empty, or one per mask
  std::uint64_t seed = 0;                  // generation seed, informational
};

struct CohortManifest {
  std::vector<ManifestSubject> subjects;
};

// JSON {"subjects": [{id, class, mask_path, surface_path?, seed?}]} where
// mask_path / surface_path may be a string or an array of strings.
// Relative paths are resolved against the manifest's directory.
CohortManifest load_cohort_manifest(const std::string& path);

struct HemisphereData {
  std::string side;
  std::size_t n_vertices = 0;
  std::uint64_t n_edges = 0;
  std::uint32_t n_components = 0;
  std::uint64_t edges_pruned = 0;
  std::string cache_key;  // hex, empty when caching is off
  BandHistogram global;
  // target size -> one histogram per parcel, parcel order
  std::map<std::uint32_t, std::vector<BandHistogram>> locals;
  std::map<std::uint32_t, std::uint64_t> parcellation_seeds;
};

struct SubjectData {
  std::string id;
  std::string class_label;
  std::vector<HemisphereData> hemispheres;
};

struct TargetStats {
  std::uint32_t target_size = 0;
  std::vector<PairwiseMatrix> pairwise;         // one per band
  std::vector<SignificantFraction> fractions;   // one per band
  GroupTestResult group;                        // local p per band at this size
};

struct PipelineResult {
  PipelineConfig config;
  std::vector<SubjectData> subjects;  // manifest order, failed ones dropped
  std::vector<std::pair<std::string, std::string>> failures;  // id, reason
  std::vector<TargetStats> stats;     // one per target size
  std::string cache_dir_used;

  // Feature view of the processed subjects at one target size.
  CohortFeatures features_at(std::uint32_t target_size) const;
};

// Full run: per subject and hemisphere, graph build (+ optional surface
// pruning, cached by content hash), global band histogram, then per target
// size parcellation and local histograms; finally pairwise and group
// statistics per target size. A subject that throws is dropped; the run
// fails when more than 10% of subjects drop.
PipelineResult run_pipeline(const PipelineConfig& config);

// features.json, per-target histogram and stats CSVs, Table-1/Table-2
// CSVs, SVG bar charts, run_manifest.json.
void emit_report(const PipelineResult& result, const std::string& out_dir);

CohortFeatures features_view(const BandSpec& band, const std::vector<SubjectData>& subjects,
                             std::uint32_t target_size);

// Round-trippable feature archive, the pipeline's features.json.
struct FeatureArchive {
  BandSpec band;
  bool exclude_zero = false;
  std::vector<std::uint32_t> target_sizes;
  std::vector<SubjectData> subjects;

  CohortFeatures features_at(std::uint32_t target_size) const {
    return features_view(band, subjects, target_size);
  }
};

void write_features_json(const PipelineResult& result, const std::string& path);
FeatureArchive read_features_json(const std::string& path);

}  // namespace cg
