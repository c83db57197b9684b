#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cortigraph/graph.hpp"
#include "cortigraph/parcellation/kmeans.hpp"
#include "cortigraph/spectral/lanczos.hpp"

namespace cg {

struct Parcellation {
  std::uint32_t n_parcels = 0;
  std::vector<std::uint32_t> labels;  // per vertex; ids ordered by first occurrence
  std::vector<std::uint64_t> sizes;   // per parcel, all positive
  std::size_t target_size = 0;
  std::uint64_t seed = 0;
  double wcss = 0.0;                  // summed over components
  std::uint32_t n_components = 0;     // of the input graph
  bool disconnected_input = false;
  std::vector<std::uint32_t> parcel_component_count;  // per parcel
  std::vector<std::vector<double>> embedding_values;  // eigenvalues per clustered piece

  double balance() const;  // max size / min size
};

struct ParcellateOptions {
  KMeansOptions kmeans;
  bool row_normalize = false;
  LanczosOptions solver;
};

// Equal-volume spectral parcellation. The parcel count is
// N = max(1, round(n / target_size)). A disconnected graph is handled per
// component: N is split across components proportionally to their sizes
// (largest remainder, at least one parcel each), and each component is
// embedded and clustered independently.
Parcellation parcellate(const VoxelGraph& g, std::size_t target_size, std::uint64_t seed,
                        const ParcellateOptions& opts = {});

// Vertex-induced subgraph per parcel, tagged "<graph tag>_p<k>". The
// subgraphs partition the vertices of g.
std::vector<VoxelGraph> local_graphs(const VoxelGraph& g, const Parcellation& p);

void save_parcellation_json(const Parcellation& p, const std::string& path);
void save_parcellation_csv(const Parcellation& p, const VoxelGraph& g,
                           const std::string& path);
Parcellation load_parcellation_json(const std::string& path);

}  // namespace cg
