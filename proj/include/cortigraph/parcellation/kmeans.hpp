#pragma once

#include <cstdint>
#include <vector>

#include "cortigraph/parcellation/embedding.hpp"

namespace cg {

struct KMeansOptions {
  std::size_t restarts = 10;
  std::size_t max_iters = 200;
};

struct KMeansResult {
  std::vector<std::uint32_t> labels;
  std::vector<double> centers;  // row-major k x dim
  std::vector<std::uint64_t> sizes;
  double wcss = 0.0;
  std::vector<double> wcss_history;  // per iteration of the winning restart
  std::size_t winning_restart = 0;
  std::size_t n_iterations = 0;
};

// Lloyd iterations with k-means++ seeding. Every cluster stays non-empty:
// a cluster that empties is reseeded to the point farthest from its current
// center. The best of `restarts` runs by final WCSS wins, ties broken by
// restart index. Deterministic for fixed (points, k, seed, options),
// including across thread counts.
//
// kmeans_cluster accelerates the scans with Hamerly-style exact distance
// bounds; kmeans_cluster_reference is the plain full-scan implementation.
// Both make identical decisions, which the tests assert.
KMeansResult kmeans_cluster(const Embedding& points, std::size_t k, std::uint64_t seed,
                            const KMeansOptions& opts = {});
KMeansResult kmeans_cluster_reference(const Embedding& points, std::size_t k,
                                      std::uint64_t seed, const KMeansOptions& opts = {});

}  // namespace cg
