#include "cortigraph/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "cortigraph/common.hpp"
#include "cortigraph/graph_build.hpp"
#include "cortigraph/parallel.hpp"
#include "cortigraph/parcellation/parcellate.hpp"
#include "cortigraph/prune.hpp"
#include "cortigraph/volume_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cg {

namespace {

std::string resolve_path(const fs::path& base, const std::string& p) {
  fs::path q(p);
  if (q.is_absolute()) return q.lexically_normal().string();
  return (base / q).lexically_normal().string();
}

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '%s'", path.c_str());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail("'%s': %s", path.c_str(), e.what());
  }
  return j;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const char* what) {
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) fail("%s: unknown key '%s'", what, key.c_str());
}

std::vector<std::string> string_or_array(const json& j, const char* what) {
  std::vector<std::string> out;
  if (j.is_string()) {
    out.push_back(j.get<std::string>());
  } else if (j.is_array()) {
    for (const auto& e : j) {
      if (!e.is_string()) fail("%s: expected string entries", what);
      out.push_back(e.get<std::string>());
    }
  } else {
    fail("%s: expected a string or an array of strings", what);
  }
  return out;
}

const char* side_name(std::size_t idx, std::size_t total, std::string& storage) {
  if (total <= 2) return idx == 0 ? "L" : "R";
  storage = strfmt("H%zu", idx + 1);
  return storage.c_str();
}

void put_bytes(std::string& buf, const void* p, std::size_t n) {
  buf.append(static_cast<const char*>(p), n);
}

template <typename T>
void put_pod(std::string& buf, const T& v) {
  put_bytes(buf, &v, sizeof v);
}

std::uint64_t graph_cache_key(const VoxelMask& mask, const TriangleMesh* mesh,
                              int connectivity) {
  std::string buf;
  buf.append(kVersion);
  buf.push_back('\0');
  for (auto d : mask.dims) put_pod(buf, d);
  for (auto s : mask.spacing) put_pod(buf, s);
  put_pod(buf, static_cast<std::uint64_t>(mask.voxels.size()));
  for (const auto& v : mask.voxels) {
    put_pod(buf, v.x);
    put_pod(buf, v.y);
    put_pod(buf, v.z);
  }
  put_pod(buf, static_cast<std::int32_t>(connectivity));
  if (mesh) {
    buf.push_back('S');
    put_pod(buf, static_cast<std::uint64_t>(mesh->vertices.size()));
    put_pod(buf, static_cast<std::uint64_t>(mesh->triangles.size()));
    for (const auto& v : mesh->vertices)
      for (double c : v) put_pod(buf, c);
    for (const auto& t : mesh->triangles)
      for (std::uint32_t i : t) put_pod(buf, i);
  }
  return fnv1a64(buf.data(), buf.size());
}

void subtract_zero_modes(BandHistogram& h, std::uint32_t n_components) {
  if (h.counts.empty()) return;
  if (h.counts[0] < n_components)
    fail("band 1 holds %llu eigenvalues but the graph has %u components",
         static_cast<unsigned long long>(h.counts[0]), n_components);
  h.counts[0] -= n_components;
}

}  // namespace

void PipelineConfig::validate() const {
  if (manifest_path.empty()) fail("pipeline config: manifest path is required");
  if (out_dir.empty()) fail("pipeline config: output directory is required");
  if (connectivity != 6 && connectivity != 18 && connectivity != 26)
    fail("pipeline config: connectivity must be 6, 18 or 26, got %d", connectivity);
  if (target_sizes.empty()) fail("pipeline config: at least one target size is required");
  for (auto t : target_sizes)
    if (t == 0) fail("pipeline config: target sizes must be positive");
  band.validate();
  if (!(alpha > 0.0 && alpha < 1.0))
    fail("pipeline config: alpha must lie in (0, 1), got %g", alpha);
  if (kmeans_restarts < 1) fail("pipeline config: kmeans_restarts must be >= 1");
  if (threads < 0) fail("pipeline config: threads must be >= 0");
  if (exclude_zero && band.lo != 0.0)
    fail("pipeline config: exclude_zero requires the band range to start at 0");
}

PipelineConfig load_pipeline_config(const std::string& path) {
  const json j = parse_json_file(path);
  if (!j.is_object()) fail("'%s': config must be a JSON object", path.c_str());
  reject_unknown_keys(j,
                      {"manifest", "out_dir", "connectivity", "target_sizes", "band",
                       "seed", "kmeans_restarts", "alpha", "threads", "exclude_zero",
                       "row_normalize", "cache", "cache_dir"},
                      "pipeline config");

  const fs::path base = fs::path(path).parent_path();
  PipelineConfig c;
  if (j.contains("manifest")) c.manifest_path = resolve_path(base, j.at("manifest"));
  if (j.contains("out_dir")) c.out_dir = resolve_path(base, j.at("out_dir"));
  if (j.contains("connectivity")) c.connectivity = j.at("connectivity").get<int>();
  if (j.contains("target_sizes"))
    c.target_sizes = j.at("target_sizes").get<std::vector<std::uint32_t>>();
  if (j.contains("band")) {
    const json& b = j.at("band");
    reject_unknown_keys(b, {"lo", "hi", "n_bands"}, "pipeline config band");
    if (b.contains("lo")) c.band.lo = b.at("lo").get<double>();
    if (b.contains("hi")) c.band.hi = b.at("hi").get<double>();
    if (b.contains("n_bands")) c.band.n_bands = b.at("n_bands").get<std::size_t>();
  }
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("kmeans_restarts"))
    c.kmeans_restarts = j.at("kmeans_restarts").get<std::uint32_t>();
  if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  if (j.contains("exclude_zero")) c.exclude_zero = j.at("exclude_zero").get<bool>();
  if (j.contains("row_normalize")) c.row_normalize = j.at("row_normalize").get<bool>();
  if (j.contains("cache")) c.cache = j.at("cache").get<bool>();
  if (j.contains("cache_dir")) c.cache_dir = resolve_path(base, j.at("cache_dir"));
  return c;
}

CohortManifest load_cohort_manifest(const std::string& path) {
  const json j = parse_json_file(path);
  if (!j.is_object() || !j.contains("subjects"))
    fail("'%s': manifest must be an object with a 'subjects' array", path.c_str());
  reject_unknown_keys(j, {"subjects", "generator"}, "cohort manifest");

  const fs::path base = fs::path(path).parent_path();
  CohortManifest m;
  std::set<std::string> ids;
  for (const auto& js : j.at("subjects")) {
    reject_unknown_keys(js, {"id", "class", "mask_path", "surface_path", "seed"},
                        "manifest subject");
    ManifestSubject s;
    s.id = js.at("id").get<std::string>();
    s.class_label = js.at("class").get<std::string>();
    if (s.id.empty() || s.class_label.empty())
      fail("manifest subject with empty id or class");
    if (!ids.insert(s.id).second) fail("duplicate subject id '%s'", s.id.c_str());
    for (auto& p : string_or_array(js.at("mask_path"), "mask_path"))
      s.mask_paths.push_back(resolve_path(base, p));
    if (s.mask_paths.empty()) fail("subject '%s' has no masks", s.id.c_str());
    if (js.contains("surface_path")) {
      for (auto& p : string_or_array(js.at("surface_path"), "surface_path"))
        s.surface_paths.push_back(resolve_path(base, p));
      if (s.surface_paths.size() != s.mask_paths.size())
        fail("subject '%s': %zu surfaces for %zu masks", s.id.c_str(),
             s.surface_paths.size(), s.mask_paths.size());
    }
    if (js.contains("seed")) s.seed = js.at("seed").get<std::uint64_t>();
    m.subjects.push_back(std::move(s));
  }
  if (m.subjects.empty()) fail("'%s': manifest lists no subjects", path.c_str());
  return m;
}

CohortFeatures features_view(const BandSpec& band, const std::vector<SubjectData>& subjects,
                             std::uint32_t target_size) {
  CohortFeatures c;
  c.band = band;
  for (const auto& sd : subjects) {
    SubjectFeatures s;
    s.id = sd.id;
    s.class_label = sd.class_label;
    for (const auto& hd : sd.hemispheres) {
      SubjectFeatures::Hemisphere h;
      h.side = hd.side;
      h.n_vertices = hd.n_vertices;
      h.n_components = hd.n_components;
      h.global_counts = hd.global.counts;
      auto it = hd.locals.find(target_size);
      if (it == hd.locals.end())
        fail("subject '%s' has no local histograms for target size %u", sd.id.c_str(),
             target_size);
      for (const auto& lh : it->second) h.local_counts.push_back(lh.counts);
      s.hemispheres.push_back(std::move(h));
    }
    c.subjects.push_back(std::move(s));
  }
  return c;
}

CohortFeatures PipelineResult::features_at(std::uint32_t target_size) const {
  return features_view(config.band, subjects, target_size);
}

namespace {

VoxelGraph obtain_graph(const PipelineConfig& config, const fs::path& cache_dir,
                        const std::string& mask_path, const std::string& surface_path,
                        HemisphereData& hd) {
  const VoxelMask mask = load_mask(mask_path);
  TriangleMesh mesh;
  const bool prune = !surface_path.empty();
  if (prune) mesh = load_mesh_off(surface_path);

  std::string cache_file;
  if (config.cache) {
    const std::uint64_t key =
        graph_cache_key(mask, prune ? &mesh : nullptr, config.connectivity);
    hd.cache_key = strfmt("%016llx", static_cast<unsigned long long>(key));
    cache_file = (cache_dir / strfmt("graph_%s.grf", hd.cache_key.c_str())).string();
    if (fs::exists(cache_file)) {
      VoxelGraph g = load_graph_grf(cache_file);
      g.spacing = mask.spacing;
      return g;
    }
  }

  VoxelGraph g = build_voxel_graph(mask, config.connectivity);
  if (prune) {
    PruneResult pr = prune_edges_by_surface(g, mesh);
    hd.edges_pruned = pr.removed.size();
    g = std::move(pr.graph);
  }
  if (config.cache) save_graph_grf(g, cache_file);
  return g;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();
  if (config.threads > 0) set_threads(config.threads);

  const CohortManifest manifest = load_cohort_manifest(config.manifest_path);

  fs::path cache_dir;
  if (const char* env = std::getenv("CORTIGRAPH_CACHE_DIR"); env && *env)
    cache_dir = env;
  else if (!config.cache_dir.empty())
    cache_dir = config.cache_dir;
  else
    cache_dir = fs::path(config.out_dir) / "cache";
  if (config.cache) fs::create_directories(cache_dir);

  PipelineResult result;
  result.config = config;
  result.cache_dir_used = config.cache ? cache_dir.string() : std::string();

  for (std::size_t si = 0; si < manifest.subjects.size(); ++si) {
    const ManifestSubject& ms = manifest.subjects[si];
    try {
      SubjectData sd;
      sd.id = ms.id;
      sd.class_label = ms.class_label;
      for (std::size_t hi = 0; hi < ms.mask_paths.size(); ++hi) {
        HemisphereData hd;
        std::string side_storage;
        hd.side = side_name(hi, ms.mask_paths.size(), side_storage);
        const std::string surface =
            ms.surface_paths.empty() ? std::string() : ms.surface_paths[hi];
        VoxelGraph g = obtain_graph(config, cache_dir, ms.mask_paths[hi], surface, hd);
        g.tag = strfmt("%s_%s", ms.id.c_str(), hd.side.c_str());
        hd.n_vertices = g.n_vertices();
        hd.n_edges = g.n_edges();
        hd.n_components = connected_components(g).count;

        SparseSymLaplacian L = normalized_laplacian(g);
        hd.global = band_histogram(L, config.band);
        hd.global.graph_id = g.tag;
        if (config.exclude_zero) subtract_zero_modes(hd.global, hd.n_components);

        for (std::size_t ti = 0; ti < config.target_sizes.size(); ++ti) {
          const std::uint32_t target = config.target_sizes[ti];
          const std::uint64_t pseed = mix_seed(mix_seed(config.seed, si, hi), ti);
          hd.parcellation_seeds[target] = pseed;

          ParcellateOptions opts;
          opts.kmeans.restarts = config.kmeans_restarts;
          opts.row_normalize = config.row_normalize;
          Parcellation parc = parcellate(g, target, pseed, opts);

          std::vector<BandHistogram> hists;
          hists.reserve(parc.n_parcels);
          std::vector<VoxelGraph> parts = local_graphs(g, parc);
          for (std::size_t k = 0; k < parts.size(); ++k) {
            SparseSymLaplacian Lk = normalized_laplacian(parts[k]);
            BandHistogram h = band_histogram(Lk, config.band);
            h.graph_id = parts[k].tag;
            if (config.exclude_zero)
              subtract_zero_modes(h, parc.parcel_component_count[k]);
            hists.push_back(std::move(h));
          }
          hd.locals.emplace(target, std::move(hists));
        }
        sd.hemispheres.push_back(std::move(hd));
      }
      result.subjects.push_back(std::move(sd));
    } catch (const std::exception& e) {
      result.failures.emplace_back(ms.id, e.what());
      std::fprintf(stderr, "subject %s dropped: %s\n", ms.id.c_str(), e.what());
    }
  }

  if (result.failures.size() * 10 > manifest.subjects.size())
    fail("%zu of %zu subjects failed (more than 10%%)", result.failures.size(),
         manifest.subjects.size());

  for (std::uint32_t target : config.target_sizes) {
    const CohortFeatures features = result.features_at(target);
    TargetStats ts;
    ts.target_size = target;
    for (std::size_t band = 0; band < features.n_bands(); ++band) {
      ts.pairwise.push_back(pairwise_test_matrix(features, band));
      ts.fractions.push_back(significant_fraction(ts.pairwise.back(), config.alpha));
    }
    ts.group = group_mean_test(features);
    result.stats.push_back(std::move(ts));
  }
  return result;
}

}  // namespace cg
