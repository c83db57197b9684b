#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cortigraph/common.hpp"
#include "cortigraph/graph_build.hpp"
#include "cortigraph/parallel.hpp"
#include "cortigraph/parcellation/parcellate.hpp"
#include "cortigraph/phantom.hpp"
#include "cortigraph/pipeline.hpp"
#include "cortigraph/prune.hpp"
#include "cortigraph/spectral/slicing.hpp"
#include "cortigraph/volume_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalArgs {
  std::uint64_t seed = 42;
  int threads = 0;
  std::string out;
};

std::string default_graph_id(const cg::VoxelGraph& g, const std::string& path) {
  if (!g.tag.empty()) return g.tag;
  return fs::path(path).stem().string();
}

cg::BandSpec band_from_flags(double lo, double hi, std::size_t bands) {
  cg::BandSpec spec;
  spec.lo = lo;
  spec.hi = hi;
  spec.n_bands = bands;
  spec.validate();
  return spec;
}

// Band-1 counts include one zero eigenvalue per connected component; this
// removes them so the band reflects only near-zero structure.
void exclude_zero_modes(cg::BandHistogram& h, std::uint32_t n_components) {
  if (h.spec.lo != 0.0) cg::fail("--exclude-zero requires the band range to start at 0");
  if (h.counts.empty()) return;
  if (h.counts[0] < n_components)
    cg::fail("band 1 holds fewer eigenvalues than the component count");
  h.counts[0] -= n_components;
}

void print_histogram(const cg::BandHistogram& h) {
  const auto bounds = h.spec.boundaries();
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    std::printf("band %2zu  [%.6g, %.6g%c  %llu\n", i + 1, bounds[i], bounds[i + 1],
                i + 1 == h.counts.size() ? ']' : ')',
                static_cast<unsigned long long>(h.counts[i]));
}

json phantom_params_json(const cg::PhantomParams& p) {
  return json{{"dims", {p.dims[0], p.dims[1], p.dims[2]}},
              {"thickness", p.thickness},
              {"amplitude", p.amplitude},
              {"freq_x", p.freq_x},
              {"freq_y", p.freq_y},
              {"phase_x", p.phase_x},
              {"phase_y", p.phase_y},
              {"phase_jitter", p.phase_jitter},
              {"noise", p.noise}};
}

std::uint32_t select_target(const cg::FeatureArchive& archive, std::uint32_t flag) {
  if (flag != 0) {
    for (auto t : archive.target_sizes)
      if (t == flag) return flag;
    cg::fail("target size %u not present in the feature archive", flag);
  }
  if (archive.target_sizes.size() != 1)
    cg::fail("archive holds %zu target sizes; pick one with --target",
             archive.target_sizes.size());
  return archive.target_sizes[0];
}

void cmd_phantom_gen(const GlobalArgs& g, const cg::PhantomParams& base, std::size_t cohort_n,
                     double freq_scale_b) {
  if (g.out.empty()) cg::fail("--out is required");
  if (cohort_n == 0) {
    cg::VoxelMask mask = cg::generate_phantom(base);
    cg::save_mask(mask, g.out);
    std::printf("phantom: %zu voxels in %ux%ux%u -> %s\n", mask.voxels.size(),
                mask.dims[0], mask.dims[1], mask.dims[2], g.out.c_str());
    return;
  }

  cg::PhantomParams class_b = base;
  class_b.freq_x *= freq_scale_b;
  class_b.freq_y *= freq_scale_b;
  const fs::path dir(g.out);
  fs::create_directories(dir);

  // One generated batch per hemisphere; subject order matches across the two.
  const std::array<std::uint64_t, 2> hemi_seeds = {cg::mix_seed(base.seed, 1),
                                                   cg::mix_seed(base.seed, 2)};
  std::vector<std::vector<cg::PhantomSubject>> batches;
  for (auto hs : hemi_seeds)
    batches.push_back(cg::generate_cohort(base, class_b, cohort_n, hs));

  json subjects = json::array();
  for (std::size_t i = 0; i < batches[0].size(); ++i) {
    json masks = json::array();
    for (std::size_t h = 0; h < 2; ++h) {
      const cg::PhantomSubject& s = batches[h][i];
      const std::string name = cg::strfmt("%s_%s.vox", s.id.c_str(), h == 0 ? "L" : "R");
      cg::save_mask(s.mask, (dir / name).string());
      masks.push_back(name);
    }
    subjects.push_back(json{{"id", batches[0][i].id},
                            {"class", batches[0][i].class_label},
                            {"mask_path", masks},
                            {"seed", cg::mix_seed(base.seed, i)}});
  }
  const json manifest{{"generator", json{{"seed", base.seed},
                                         {"n_per_class", cohort_n},
                                         {"params_a", phantom_params_json(base)},
                                         {"params_b", phantom_params_json(class_b)}}},
                      {"subjects", subjects}};
  const fs::path mpath = dir / "cohort.json";
  std::ofstream out(mpath);
  if (!out) cg::fail("cannot write '%s'", mpath.string().c_str());
  out << manifest.dump(1) << '\n';
  std::printf("cohort: %zu subjects, manifest %s\n", batches[0].size(),
              mpath.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voxel-mask graphs, Laplacian band spectra, parcellation and cohort statistics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cg::kVersion));
  app.fallthrough();

  GlobalArgs g;
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker thread count (0 keeps the runtime default)");
  app.add_option("--out", g.out, "Output file or directory");

  // phantom gen
  auto* phantom = app.add_subcommand("phantom", "Synthetic folded-sheet masks");
  phantom->require_subcommand(1);
  auto* gen = phantom->add_subcommand("gen", "Generate one mask, or a two-class cohort with --cohort");
  gen->fallthrough();
  std::vector<std::uint32_t> dims = {64, 64, 16};
  cg::PhantomParams base;
  std::size_t cohort_n = 0;
  double freq_scale_b = 1.5;
  gen->add_option("--dims", dims, "Grid size nx ny nz")->expected(3)->capture_default_str();
  gen->add_option("--thickness", base.thickness, "Sheet thickness, voxels")->capture_default_str();
  gen->add_option("--amplitude", base.amplitude, "Fold amplitude, voxels")->capture_default_str();
  gen->add_option("--freq-x", base.freq_x, "Folds across x")->capture_default_str();
  gen->add_option("--freq-y", base.freq_y, "Folds across y")->capture_default_str();
  gen->add_option("--phase-x", base.phase_x, "Phase offset x, radians");
  gen->add_option("--phase-y", base.phase_y, "Phase offset y, radians");
  gen->add_option("--phase-jitter", base.phase_jitter, "Per-subject phase spread, radians");
  gen->add_option("--noise", base.noise, "Boundary flip probability");
  gen->add_option("--cohort", cohort_n, "Subjects per class; --out becomes a directory");
  gen->add_option("--freq-scale-b", freq_scale_b, "Class-B frequency multiplier")->capture_default_str();
  gen->callback([&] {
    base.dims = {dims[0], dims[1], dims[2]};
    base.seed = g.seed;
    cmd_phantom_gen(g, base, cohort_n, freq_scale_b);
  });

  // graph build / graph prune
  auto* graph = app.add_subcommand("graph", "Voxel adjacency graphs");
  graph->require_subcommand(1);

  auto* build = graph->add_subcommand("build", "Mask to adjacency graph");
  build->fallthrough();
  std::string build_mask, build_json;
  int build_conn = 26;
  build->add_option("--mask", build_mask, "Input mask (.vox text or .nii)")->required();
  build->add_option("--connectivity", build_conn, "6, 18 or 26")->capture_default_str();
  build->add_option("--json", build_json, "Also write a JSON dump (small graphs)");
  build->callback([&] {
    if (g.out.empty()) cg::fail("--out is required");
    if (g.threads > 0) cg::set_threads(g.threads);
    const cg::VoxelMask mask = cg::load_mask(build_mask);
    cg::VoxelGraph graph_out = cg::build_voxel_graph(mask, build_conn);
    cg::save_graph_grf(graph_out, g.out);
    if (!build_json.empty()) cg::save_graph_json(graph_out, build_json);
    const auto comps = cg::connected_components(graph_out);
    std::printf("graph: %zu vertices, %llu edges, %u components -> %s\n",
                graph_out.n_vertices(), static_cast<unsigned long long>(graph_out.n_edges()),
                comps.count, g.out.c_str());
  });

  auto* prune = graph->add_subcommand("prune", "Drop edges crossing a surface mesh");
  prune->fallthrough();
  std::string prune_graph, prune_surface;
  std::vector<double> prune_spacing = {1.0, 1.0, 1.0};
  prune->add_option("--graph", prune_graph, "Input graph (.grf)")->required();
  prune->add_option("--surface", prune_surface, "Triangle mesh (.off)")->required();
  prune->add_option("--spacing", prune_spacing, "Voxel spacing sx sy sz")->expected(3);
  prune->callback([&] {
    if (g.out.empty()) cg::fail("--out is required");
    if (g.threads > 0) cg::set_threads(g.threads);
    cg::VoxelGraph graph_in = cg::load_graph_grf(prune_graph);
    graph_in.spacing = {prune_spacing[0], prune_spacing[1], prune_spacing[2]};
    cg::MeshLoadStats mstats;
    const cg::TriangleMesh mesh = cg::load_mesh_off(prune_surface, &mstats);
    if (mstats.degenerate_dropped > 0)
      std::fprintf(stderr, "note: dropped %zu degenerate faces\n", mstats.degenerate_dropped);
    const auto before = cg::connected_components(graph_in).count;
    cg::PruneResult pr = cg::prune_edges_by_surface(graph_in, mesh);
    if (pr.empty_mesh) std::fprintf(stderr, "note: empty mesh, nothing pruned\n");
    const auto after = cg::connected_components(pr.graph).count;
    cg::save_graph_grf(pr.graph, g.out);
    std::printf("prune: removed %zu edges, components %u -> %u, %s\n", pr.removed.size(),
                before, after, g.out.c_str());
  });

  // parcellate
  auto* parcellate_cmd = app.add_subcommand("parcellate", "Equal-volume spectral parcellation");
  parcellate_cmd->fallthrough();
  std::string parc_graph, parc_csv;
  std::size_t parc_target = 0;
  std::uint32_t parc_restarts = 10;
  bool parc_rownorm = false, parc_emit_eigs = false;
  parcellate_cmd->add_option("--graph", parc_graph, "Input graph (.grf)")->required();
  parcellate_cmd->add_option("--target-size", parc_target, "Target vertices per parcel")->required();
  parcellate_cmd->add_option("--restarts", parc_restarts, "k-means restarts")->capture_default_str();
  parcellate_cmd->add_flag("--row-normalize", parc_rownorm, "Normalize embedding rows to unit length");
  parcellate_cmd->add_option("--csv", parc_csv, "Also write per-voxel labels as CSV");
  parcellate_cmd->add_flag("--emit-eigs", parc_emit_eigs, "Print embedding eigenvalues");
  parcellate_cmd->callback([&] {
    if (g.out.empty()) cg::fail("--out is required");
    if (g.threads > 0) cg::set_threads(g.threads);
    const cg::VoxelGraph graph_in = cg::load_graph_grf(parc_graph);
    cg::ParcellateOptions opts;
    opts.kmeans.restarts = parc_restarts;
    opts.row_normalize = parc_rownorm;
    const cg::Parcellation parc = cg::parcellate(graph_in, parc_target, g.seed, opts);
    cg::save_parcellation_json(parc, g.out);
    if (!parc_csv.empty()) cg::save_parcellation_csv(parc, graph_in, parc_csv);
    std::printf("parcellation: %u parcels over %zu vertices, balance %.6g, wcss %.6g -> %s\n",
                parc.n_parcels, graph_in.n_vertices(), parc.balance(), parc.wcss,
                g.out.c_str());
    if (parc_emit_eigs)
      for (std::size_t c = 0; c < parc.embedding_values.size(); ++c) {
        std::printf("piece %zu eigenvalues:", c);
        for (double v : parc.embedding_values[c]) std::printf(" %.6g", v);
        std::printf("\n");
      }
  });

  // spectrum bands
  auto* spectrum = app.add_subcommand("spectrum", "Laplacian spectra");
  spectrum->require_subcommand(1);
  auto* bands = spectrum->add_subcommand("bands", "Eigenvalue counts per spectral band");
  bands->fallthrough();
  std::string bands_graph, bands_id;
  double bands_lo = 0.0, bands_hi = 0.1;
  std::size_t bands_n = 10;
  bool bands_exclude_zero = false;
  bands->add_option("--graph", bands_graph, "Input graph (.grf)")->required();
  bands->add_option("--lo", bands_lo, "Range start")->capture_default_str();
  bands->add_option("--hi", bands_hi, "Range end")->capture_default_str();
  bands->add_option("--bands", bands_n, "Band count")->capture_default_str();
  bands->add_flag("--exclude-zero", bands_exclude_zero,
                  "Subtract the component count from band 1");
  bands->add_option("--graph-id", bands_id, "Identifier for CSV rows");
  bands->callback([&] {
    if (g.threads > 0) cg::set_threads(g.threads);
    const cg::VoxelGraph graph_in = cg::load_graph_grf(bands_graph);
    const cg::SparseSymLaplacian L = cg::normalized_laplacian(graph_in);
    cg::BandHistogram hist = cg::band_histogram(L, band_from_flags(bands_lo, bands_hi, bands_n));
    hist.graph_id = bands_id.empty() ? default_graph_id(graph_in, bands_graph) : bands_id;
    if (bands_exclude_zero)
      exclude_zero_modes(hist, cg::connected_components(graph_in).count);
    print_histogram(hist);
    if (!g.out.empty()) cg::write_band_histogram_csv(g.out, {hist});
  });

  // features
  auto* features = app.add_subcommand("features", "Global + per-parcel band counts of one graph");
  features->fallthrough();
  std::string feat_graph, feat_parcels;
  double feat_lo = 0.0, feat_hi = 0.1;
  std::size_t feat_bands = 10;
  bool feat_exclude_zero = false;
  features->add_option("--graph", feat_graph, "Input graph (.grf)")->required();
  features->add_option("--parcels", feat_parcels, "Parcellation JSON")->required();
  features->add_option("--lo", feat_lo, "Range start")->capture_default_str();
  features->add_option("--hi", feat_hi, "Range end")->capture_default_str();
  features->add_option("--bands", feat_bands, "Band count")->capture_default_str();
  features->add_flag("--exclude-zero", feat_exclude_zero,
                     "Subtract component counts from band 1");
  features->callback([&] {
    if (g.out.empty()) cg::fail("--out is required");
    if (g.threads > 0) cg::set_threads(g.threads);
    const cg::VoxelGraph graph_in = cg::load_graph_grf(feat_graph);
    const cg::Parcellation parc = cg::load_parcellation_json(feat_parcels);
    if (parc.labels.size() != graph_in.n_vertices())
      cg::fail("parcellation covers %zu vertices, graph has %zu", parc.labels.size(),
               graph_in.n_vertices());
    const cg::BandSpec spec = band_from_flags(feat_lo, feat_hi, feat_bands);

    cg::BandHistogram global = cg::band_histogram(cg::normalized_laplacian(graph_in), spec);
    global.graph_id = default_graph_id(graph_in, feat_graph);
    if (feat_exclude_zero)
      exclude_zero_modes(global, cg::connected_components(graph_in).count);

    json locals = json::array();
    const auto parts = cg::local_graphs(graph_in, parc);
    for (std::size_t k = 0; k < parts.size(); ++k) {
      cg::BandHistogram h = cg::band_histogram(cg::normalized_laplacian(parts[k]), spec);
      if (feat_exclude_zero) exclude_zero_modes(h, parc.parcel_component_count[k]);
      locals.push_back(h.counts);
    }
    const json out_json{{"graph_id", global.graph_id},
                        {"band", json{{"lo", spec.lo}, {"hi", spec.hi}, {"n_bands", spec.n_bands}}},
                        {"target_size", parc.target_size},
                        {"global_counts", global.counts},
                        {"local_counts", locals}};
    std::ofstream out(g.out);
    if (!out) cg::fail("cannot write '%s'", g.out.c_str());
    out << out_json.dump(1) << '\n';
    std::printf("features: %u parcels -> %s\n", parc.n_parcels, g.out.c_str());
  });

  // stats pairwise / stats group
  auto* stats = app.add_subcommand("stats", "Cohort statistics from a feature archive");
  stats->require_subcommand(1);

  auto* pairwise = stats->add_subcommand("pairwise", "Rank-sum test per subject pair and band");
  pairwise->fallthrough();
  std::string pw_features;
  std::uint32_t pw_target = 0;
  double pw_alpha = 0.05;
  pairwise->add_option("--features", pw_features, "features.json from a pipeline run")->required();
  pairwise->add_option("--target", pw_target, "Target size (defaults to the archive's only one)");
  pairwise->add_option("--alpha", pw_alpha, "Significance level")->capture_default_str();
  pairwise->callback([&] {
    const cg::FeatureArchive archive = cg::read_features_json(pw_features);
    const std::uint32_t target = select_target(archive, pw_target);
    const cg::CohortFeatures cf = archive.features_at(target);
    std::ofstream out;
    if (!g.out.empty()) {
      out.open(g.out);
      if (!out) cg::fail("cannot write '%s'", g.out.c_str());
      out << "subject_a,subject_b,class,band,p\n";
    }
    double os_sum = 0.0, ss_sum = 0.0;
    for (std::size_t b = 0; b < cf.n_bands(); ++b) {
      const cg::PairwiseMatrix m = cg::pairwise_test_matrix(cf, b);
      const cg::SignificantFraction f = cg::significant_fraction(m, pw_alpha);
      os_sum += f.os_fraction * 100.0;
      ss_sum += f.ss_fraction * 100.0;
      std::printf("band %2zu  OS %3d%% (%llu/%llu)  SS %3d%% (%llu/%llu)\n", b + 1,
                  f.os_percent(), static_cast<unsigned long long>(f.os_significant),
                  static_cast<unsigned long long>(f.os_total), f.ss_percent(),
                  static_cast<unsigned long long>(f.ss_significant),
                  static_cast<unsigned long long>(f.ss_total));
      if (out.is_open())
        for (const auto& e : m.entries)
          out << cf.subjects[e.a].id << ',' << cf.subjects[e.b].id << ','
              << (e.same_class ? "SS" : "OS") << ',' << b + 1 << ','
              << cg::strfmt("%.5e", e.p) << '\n';
    }
    const double nb = static_cast<double>(cf.n_bands());
    std::printf("average  OS %ld%%  SS %ld%%  (alpha %.6g, target %u)\n",
                std::lround(os_sum / nb), std::lround(ss_sum / nb), pw_alpha, target);
  });

  auto* group = stats->add_subcommand("group", "Class-mean rank-sum test per band");
  group->fallthrough();
  std::string gr_features;
  std::uint32_t gr_target = 0;
  group->add_option("--features", gr_features, "features.json from a pipeline run")->required();
  group->add_option("--target", gr_target, "Target size (defaults to the archive's only one)");
  group->callback([&] {
    const cg::FeatureArchive archive = cg::read_features_json(gr_features);
    const std::uint32_t target = select_target(archive, gr_target);
    const cg::GroupTestResult r = cg::group_mean_test(archive.features_at(target));
    std::ofstream out;
    if (!g.out.empty()) {
      out.open(g.out);
      if (!out) cg::fail("cannot write '%s'", g.out.c_str());
      out << "band,feature_source,p_value\n";
    }
    for (std::size_t b = 0; b < r.local_p.size(); ++b) {
      std::printf("band %2zu  local p %.5e  global p %.5e\n", b + 1, r.local_p[b],
                  r.global_p[b]);
      if (out.is_open()) {
        out << b + 1 << ",local_" << target << ',' << cg::strfmt("%.5e", r.local_p[b]) << '\n';
        out << b + 1 << ",global," << cg::strfmt("%.5e", r.global_p[b]) << '\n';
      }
    }
  });

  // pipeline run
  auto* pipeline = app.add_subcommand("pipeline", "End-to-end cohort processing");
  pipeline->require_subcommand(1);
  auto* run = pipeline->add_subcommand("run", "Masks to graphs, parcels, band features and statistics");
  run->fallthrough();
  std::string run_config;
  run->add_option("--config", run_config, "Pipeline config JSON")->required();
  run->callback([&] {
    cg::PipelineConfig cfg = cg::load_pipeline_config(run_config);
    if (!g.out.empty()) cfg.out_dir = g.out;
    if (app.count("--seed") > 0) cfg.seed = g.seed;
    if (app.count("--threads") > 0) cfg.threads = g.threads;
    const cg::PipelineResult result = cg::run_pipeline(cfg);
    cg::emit_report(result, cfg.out_dir);
    std::printf("pipeline: %zu subjects processed, %zu dropped\n", result.subjects.size(),
                result.failures.size());
    for (const auto& ts : result.stats) {
      double os_sum = 0.0, ss_sum = 0.0;
      for (const auto& f : ts.fractions) {
        os_sum += f.os_fraction * 100.0;
        ss_sum += f.ss_fraction * 100.0;
      }
      const double nb = static_cast<double>(ts.fractions.size());
      std::printf("target %u: OS %ld%%  SS %ld%%  (alpha %.6g)\n", ts.target_size,
                  std::lround(os_sum / nb), std::lround(ss_sum / nb), cfg.alpha);
    }
    std::printf("report: %s\n", cfg.out_dir.c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
