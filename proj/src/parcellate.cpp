#include "cortigraph/parcellation/parcellate.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>

namespace cg {

double Parcellation::balance() const {
  if (sizes.empty()) return 0.0;
  auto [mn, mx] = std::minmax_element(sizes.begin(), sizes.end());
  return static_cast<double>(*mx) / static_cast<double>(*mn);
}

namespace {

// Proportional parcel quota per component: one parcel each, then the rest
// by a highest-averages rule (exact integer comparisons), capped by the
// component size.
std::vector<std::size_t> component_quotas(const std::vector<std::uint64_t>& comp_sizes,
                                          std::size_t n_total) {
  std::size_t c = comp_sizes.size();
  std::vector<std::size_t> quota(c, 1);
  std::size_t assigned = c;
  std::size_t want = std::max(n_total, c);
  while (assigned < want) {
    std::size_t best = c;
    for (std::size_t i = 0; i < c; ++i) {
      if (quota[i] >= comp_sizes[i]) continue;  // never more parcels than vertices
      if (best == c) {
        best = i;
        continue;
      }
      auto lhs = static_cast<unsigned __int128>(comp_sizes[i]) * (quota[best] + 1);
      auto rhs = static_cast<unsigned __int128>(comp_sizes[best]) * (quota[i] + 1);
      if (lhs > rhs) best = i;
    }
    if (best == c) break;  // every component saturated
    ++quota[best];
    ++assigned;
  }
  return quota;
}

}  // namespace

Parcellation parcellate(const VoxelGraph& g, std::size_t target_size, std::uint64_t seed,
                        const ParcellateOptions& opts) {
  std::size_t n = g.n_vertices();
  if (n == 0) fail("parcellate: empty graph");
  if (target_size == 0) fail("parcellate: target_size must be positive");

  auto n_parcels_requested = static_cast<std::size_t>(std::llround(
      static_cast<double>(n) / static_cast<double>(target_size)));
  if (n_parcels_requested < 1) n_parcels_requested = 1;

  ComponentLabels comps = connected_components(g);

  Parcellation out;
  out.target_size = target_size;
  out.seed = seed;
  out.n_components = comps.count;
  out.disconnected_input = comps.count > 1;
  out.labels.assign(n, 0);

  std::vector<std::size_t> quota = component_quotas(comps.sizes, n_parcels_requested);

  std::vector<std::vector<std::uint32_t>> comp_vertices(comps.count);
  for (std::size_t ci = 0; ci < comps.count; ++ci)
    comp_vertices[ci].reserve(comps.sizes[ci]);
  for (std::size_t v = 0; v < n; ++v)
    comp_vertices[comps.labels[v]].push_back(static_cast<std::uint32_t>(v));

  std::uint32_t next_parcel = 0;
  for (std::size_t ci = 0; ci < comps.count; ++ci) {
    const auto& ids = comp_vertices[ci];
    std::size_t nc = quota[ci];
    if (nc <= 1) {
      for (std::uint32_t v : ids) out.labels[v] = next_parcel;
      ++next_parcel;
      continue;
    }
    VoxelGraph sub = ids.size() == n ? g : extract_subgraph(g, ids);
    SparseSymLaplacian L = normalized_laplacian(sub);
    LanczosOptions solver = opts.solver;
    solver.seed = mix_seed(seed, 2 * ci + 1);
    EigenpairSet eig = smallest_eigenpairs(L, nc, solver);
    Embedding emb = embedding_from_eigenpairs(eig, opts.row_normalize);
    KMeansResult km = kmeans_cluster(emb, nc, mix_seed(seed, 2 * ci), opts.kmeans);
    for (std::size_t j = 0; j < ids.size(); ++j)
      out.labels[ids[j]] = next_parcel + km.labels[j];
    next_parcel += static_cast<std::uint32_t>(nc);
    out.wcss += km.wcss;
    out.embedding_values.push_back(eig.values);
  }

  // Canonical label ids: order of first occurrence along the vertex order.
  std::vector<std::uint32_t> remap(next_parcel, 0xffffffffu);
  std::uint32_t next_id = 0;
  for (std::size_t v = 0; v < n; ++v) {
    std::uint32_t& m = remap[out.labels[v]];
    if (m == 0xffffffffu) m = next_id++;
    out.labels[v] = m;
  }
  out.n_parcels = next_id;
  out.sizes.assign(out.n_parcels, 0);
  for (std::uint32_t l : out.labels) ++out.sizes[l];

  out.parcel_component_count.resize(out.n_parcels);
  {
    std::vector<std::vector<std::uint32_t>> members(out.n_parcels);
    for (std::size_t v = 0; v < n; ++v)
      members[out.labels[v]].push_back(static_cast<std::uint32_t>(v));
    for (std::uint32_t p = 0; p < out.n_parcels; ++p) {
      VoxelGraph sub = extract_subgraph(g, members[p]);
      out.parcel_component_count[p] = connected_components(sub).count;
    }
  }
  return out;
}

std::vector<VoxelGraph> local_graphs(const VoxelGraph& g, const Parcellation& p) {
  if (p.labels.size() != g.n_vertices())
    fail("local_graphs: parcellation does not match the graph");
  std::vector<std::vector<std::uint32_t>> members(p.n_parcels);
  for (std::size_t v = 0; v < g.n_vertices(); ++v)
    members[p.labels[v]].push_back(static_cast<std::uint32_t>(v));
  std::vector<VoxelGraph> out;
  out.reserve(p.n_parcels);
  for (std::uint32_t k = 0; k < p.n_parcels; ++k) {
    VoxelGraph sub = extract_subgraph(g, members[k]);
    sub.tag = g.tag + "_p" + std::to_string(k);
    out.push_back(std::move(sub));
  }
  return out;
}

void save_parcellation_json(const Parcellation& p, const std::string& path) {
  nlohmann::json j;
  j["n_parcels"] = p.n_parcels;
  j["target_size"] = p.target_size;
  j["seed"] = p.seed;
  j["wcss"] = p.wcss;
  j["n_components"] = p.n_components;
  j["disconnected_input"] = p.disconnected_input;
  j["sizes"] = p.sizes;
  j["balance"] = p.balance();
  j["parcel_component_count"] = p.parcel_component_count;
  j["labels"] = p.labels;
  j["embedding_values"] = p.embedding_values;
  std::ofstream out(path);
  if (!out) fail("cannot write '%s'", path.c_str());
  out << j.dump(1) << '\n';
  if (!out) fail("write failed on '%s'", path.c_str());
}

Parcellation load_parcellation_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '%s'", path.c_str());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail("'%s': %s", path.c_str(), e.what());
  }
  Parcellation p;
  p.n_parcels = j.at("n_parcels").get<std::uint32_t>();
  p.target_size = j.at("target_size").get<std::size_t>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.wcss = j.at("wcss").get<double>();
  p.n_components = j.at("n_components").get<std::uint32_t>();
  p.disconnected_input = j.at("disconnected_input").get<bool>();
  p.sizes = j.at("sizes").get<std::vector<std::uint64_t>>();
  p.parcel_component_count = j.at("parcel_component_count").get<std::vector<std::uint32_t>>();
  p.labels = j.at("labels").get<std::vector<std::uint32_t>>();
  if (j.contains("embedding_values"))
    p.embedding_values = j.at("embedding_values").get<std::vector<std::vector<double>>>();
  return p;
}

void save_parcellation_csv(const Parcellation& p, const VoxelGraph& g,
                           const std::string& path) {
  if (p.labels.size() != g.n_vertices())
    fail("save_parcellation_csv: parcellation does not match the graph");
  std::ofstream out(path);
  if (!out) fail("cannot write '%s'", path.c_str());
  out << "x,y,z,parcel\n";
  for (std::size_t v = 0; v < g.n_vertices(); ++v)
    out << g.coords[v].x << ',' << g.coords[v].y << ',' << g.coords[v].z << ','
        << p.labels[v] << '\n';
  if (!out) fail("write failed on '%s'", path.c_str());
}

}  // namespace cg
