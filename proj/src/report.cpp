#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cortigraph/common.hpp"
#include "cortigraph/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cg {

namespace {

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) fail("cannot write '%s'", path.string().c_str());
  return out;
}

void close_checked(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out.good()) fail("write failed for '%s'", path.string().c_str());
}

std::string fmt_p(double p) { return strfmt("%.5e", p); }

json band_to_json(const BandSpec& b) {
  return json{{"lo", b.lo}, {"hi", b.hi}, {"n_bands", b.n_bands}};
}

BandSpec band_from_json(const json& j) {
  BandSpec b;
  b.lo = j.at("lo").get<double>();
  b.hi = j.at("hi").get<double>();
  b.n_bands = j.at("n_bands").get<std::size_t>();
  b.validate();
  return b;
}

void dump_json(const json& j, const fs::path& path) {
  auto out = open_out(path);
  out << j.dump(1) << '\n';
  close_checked(out, path);
}

// One bar-chart panel at (x0, y0). Counts are scaled to the tallest bar.
void svg_panel(std::string& svg, double x0, double y0, double w, double h,
               const std::string& title, const BandHistogram& hist) {
  const double left = 30, right = 6, top = 16, bottom = 18;
  const double pw = w - left - right, ph = h - top - bottom;
  const std::size_t k = hist.counts.size();
  std::uint64_t max_count = 1;
  for (auto c : hist.counts) max_count = std::max(max_count, c);

  svg += strfmt("<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\">%s</text>\n", x0 + left,
                y0 + 11.0, title.c_str());
  svg += strfmt(
      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#555\"/>\n",
      x0 + left, y0 + top, x0 + left, y0 + top + ph);
  svg += strfmt(
      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#555\"/>\n",
      x0 + left, y0 + top + ph, x0 + left + pw, y0 + top + ph);
  svg += strfmt(
      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"8\" text-anchor=\"end\">%llu</text>\n",
      x0 + left - 2, y0 + top + 8.0, static_cast<unsigned long long>(max_count));

  const double step = pw / static_cast<double>(k);
  const double bw = step * 0.8;
  for (std::size_t i = 0; i < k; ++i) {
    const double bh = ph * static_cast<double>(hist.counts[i]) /
                      static_cast<double>(max_count);
    const double bx = x0 + left + step * static_cast<double>(i) + step * 0.1;
    svg += strfmt(
        "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"#4a6fa5\"/>\n",
        bx, y0 + top + ph - bh, bw, bh);
    if (k <= 16)
      svg += strfmt(
          "<text x=\"%.1f\" y=\"%.1f\" font-size=\"7\" text-anchor=\"middle\">%zu</text>\n",
          bx + bw / 2, y0 + top + ph + 9.0, i + 1);
  }
}

void write_svg(const fs::path& path, const std::vector<BandHistogram>& hists) {
  const std::size_t n = hists.size();
  const std::size_t cols =
      n == 1 ? 1 : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  const std::size_t rows = (n + cols - 1) / cols;
  const double pw = n == 1 ? 360 : 190, ph = n == 1 ? 240 : 140;
  const double W = pw * static_cast<double>(cols), H = ph * static_cast<double>(rows);

  std::string svg = strfmt(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
      "viewBox=\"0 0 %.0f %.0f\" font-family=\"sans-serif\">\n"
      "<rect width=\"%.0f\" height=\"%.0f\" fill=\"white\"/>\n",
      W, H, W, H, W, H);
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = pw * static_cast<double>(i % cols);
    const double y0 = ph * static_cast<double>(i / cols);
    svg_panel(svg, x0, y0, pw, ph, hists[i].graph_id, hists[i]);
  }
  svg += "</svg>\n";

  auto out = open_out(path);
  out << svg;
  close_checked(out, path);
}

std::string pair_class(bool same_class) { return same_class ? "SS" : "OS"; }

void write_pairwise_csv(const fs::path& path, const TargetStats& ts,
                        const std::vector<SubjectData>& subjects) {
  auto out = open_out(path);
  out << "subject_a,subject_b,class,band,p\n";
  for (std::size_t b = 0; b < ts.pairwise.size(); ++b)
    for (const auto& e : ts.pairwise[b].entries)
      out << subjects[e.a].id << ',' << subjects[e.b].id << ',' << pair_class(e.same_class)
          << ',' << b + 1 << ',' << fmt_p(e.p) << '\n';
  close_checked(out, path);
}

void write_heatmap_csv(const fs::path& path, const TargetStats& ts,
                       const std::vector<SubjectData>& subjects, bool same_class) {
  auto out = open_out(path);
  out << "pair";
  for (std::size_t b = 0; b < ts.pairwise.size(); ++b) out << ",band_" << b + 1;
  out << '\n';
  if (ts.pairwise.empty()) {
    close_checked(out, path);
    return;
  }
  // Pair enumeration order is identical across bands.
  const auto& pairs = ts.pairwise[0].entries;
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    if (pairs[j].same_class != same_class) continue;
    out << subjects[pairs[j].a].id << '|' << subjects[pairs[j].b].id;
    for (const auto& band : ts.pairwise) out << ',' << fmt_p(band.entries[j].p);
    out << '\n';
  }
  close_checked(out, path);
}

void write_table1(const fs::path& path, const PipelineResult& r) {
  auto out = open_out(path);
  out << "graph_size,class";
  for (std::size_t b = 0; b < r.config.band.n_bands; ++b) out << ",band_" << b + 1;
  out << ",average\n";
  for (const auto& ts : r.stats) {
    for (int cls = 0; cls < 2; ++cls) {
      const bool os = cls == 0;
      out << ts.target_size << ',' << (os ? "OS" : "SS");
      double pct_sum = 0.0;
      for (const auto& f : ts.fractions) {
        const double frac = os ? f.os_fraction : f.ss_fraction;
        pct_sum += frac * 100.0;
        out << ',' << (os ? f.os_percent() : f.ss_percent());
      }
      out << ',' << std::lround(pct_sum / static_cast<double>(ts.fractions.size()))
          << '\n';
    }
  }
  close_checked(out, path);
}

void write_table2(const fs::path& path, const PipelineResult& r) {
  auto out = open_out(path);
  out << "band,feature_source,p_value\n";
  for (std::size_t b = 0; b < r.config.band.n_bands; ++b) {
    for (const auto& ts : r.stats)
      out << b + 1 << ",local_" << ts.target_size << ',' << fmt_p(ts.group.local_p[b])
          << '\n';
    out << b + 1 << ",global," << fmt_p(r.stats.front().group.global_p[b]) << '\n';
  }
  close_checked(out, path);
}

json config_to_json(const PipelineConfig& c) {
  return json{{"manifest", c.manifest_path},
              {"out_dir", c.out_dir},
              {"connectivity", c.connectivity},
              {"target_sizes", c.target_sizes},
              {"band", band_to_json(c.band)},
              {"seed", c.seed},
              {"kmeans_restarts", c.kmeans_restarts},
              {"alpha", c.alpha},
              {"threads", c.threads},
              {"exclude_zero", c.exclude_zero},
              {"row_normalize", c.row_normalize},
              {"cache", c.cache},
              {"cache_dir", c.cache_dir}};
}

void write_run_manifest(const fs::path& path, const PipelineResult& r) {
  json subjects = json::array();
  for (const auto& sd : r.subjects) {
    json hemis = json::array();
    for (const auto& hd : sd.hemispheres) {
      json seeds = json::object();
      for (const auto& [target, seed] : hd.parcellation_seeds)
        seeds[std::to_string(target)] = seed;
      hemis.push_back(json{{"side", hd.side},
                           {"n_vertices", hd.n_vertices},
                           {"n_edges", hd.n_edges},
                           {"n_components", hd.n_components},
                           {"cache_key", hd.cache_key},
                           {"parcellation_seeds", seeds}});
    }
    subjects.push_back(
        json{{"id", sd.id}, {"class", sd.class_label}, {"hemispheres", hemis}});
  }
  json failures = json::array();
  for (const auto& [id, reason] : r.failures)
    failures.push_back(json{{"id", id}, {"reason", reason}});

  dump_json(json{{"version", kVersion},
                 {"config", config_to_json(r.config)},
                 {"cache_dir", r.cache_dir_used},
                 {"subjects", subjects},
                 {"failures", failures}},
            path);
}

}  // namespace

void write_features_json(const PipelineResult& result, const std::string& path) {
  json subjects = json::array();
  for (const auto& sd : result.subjects) {
    json hemis = json::array();
    for (const auto& hd : sd.hemispheres) {
      json locals = json::object();
      for (const auto& [target, hists] : hd.locals) {
        json arr = json::array();
        for (const auto& h : hists) arr.push_back(h.counts);
        locals[std::to_string(target)] = std::move(arr);
      }
      hemis.push_back(json{{"side", hd.side},
                           {"n_vertices", hd.n_vertices},
                           {"n_components", hd.n_components},
                           {"global_counts", hd.global.counts},
                           {"locals", locals}});
    }
    subjects.push_back(
        json{{"id", sd.id}, {"class", sd.class_label}, {"hemispheres", hemis}});
  }
  dump_json(json{{"version", kVersion},
                 {"band", band_to_json(result.config.band)},
                 {"exclude_zero", result.config.exclude_zero},
                 {"target_sizes", result.config.target_sizes},
                 {"subjects", subjects}},
            path);
}

FeatureArchive read_features_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '%s'", path.c_str());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail("'%s': %s", path.c_str(), e.what());
  }

  FeatureArchive a;
  a.band = band_from_json(j.at("band"));
  a.exclude_zero = j.value("exclude_zero", false);
  a.target_sizes = j.at("target_sizes").get<std::vector<std::uint32_t>>();
  for (const auto& js : j.at("subjects")) {
    SubjectData sd;
    sd.id = js.at("id").get<std::string>();
    sd.class_label = js.at("class").get<std::string>();
    for (const auto& jh : js.at("hemispheres")) {
      HemisphereData hd;
      hd.side = jh.at("side").get<std::string>();
      hd.n_vertices = jh.at("n_vertices").get<std::size_t>();
      hd.n_components = jh.at("n_components").get<std::uint32_t>();
      hd.global.spec = a.band;
      hd.global.counts = jh.at("global_counts").get<std::vector<std::uint64_t>>();
      hd.global.graph_id = strfmt("%s_%s", sd.id.c_str(), hd.side.c_str());
      for (const auto& [key, arr] : jh.at("locals").items()) {
        const auto target = static_cast<std::uint32_t>(std::stoul(key));
        std::vector<BandHistogram> hists;
        for (std::size_t k = 0; k < arr.size(); ++k) {
          BandHistogram h;
          h.spec = a.band;
          h.counts = arr[k].get<std::vector<std::uint64_t>>();
          h.graph_id = strfmt("%s_p%zu", hd.global.graph_id.c_str(), k);
          hists.push_back(std::move(h));
        }
        hd.locals.emplace(target, std::move(hists));
      }
      sd.hemispheres.push_back(std::move(hd));
    }
    a.subjects.push_back(std::move(sd));
  }
  return a;
}

void emit_report(const PipelineResult& result, const std::string& out_dir) {
  const fs::path root(out_dir);
  fs::create_directories(root);

  write_features_json(result, (root / "features.json").string());
  write_run_manifest(root / "run_manifest.json", result);

  for (const auto& ts : result.stats) {
    const std::string tdir = strfmt("t%u", ts.target_size);
    fs::create_directories(root / "histograms" / tdir);
    for (const auto& sd : result.subjects)
      for (const auto& hd : sd.hemispheres) {
        const auto& locals = hd.locals.at(ts.target_size);
        BandHistogram global = hd.global;
        global.per_parcel_divisor = static_cast<double>(locals.size());
        const std::string stem = strfmt("%s_%s", sd.id.c_str(), hd.side.c_str());
        write_band_histogram_csv(
            (root / "histograms" / tdir / (stem + "_global.csv")).string(), {global});
        write_band_histogram_csv(
            (root / "histograms" / tdir / (stem + "_local.csv")).string(), locals);
        write_svg(root / "svg" / tdir / (stem + "_global.svg"), {global});
        write_svg(root / "svg" / tdir / (stem + "_local.svg"), locals);
      }

    write_pairwise_csv(root / "stats" / strfmt("pairwise_%s.csv", tdir.c_str()), ts,
                       result.subjects);
    write_heatmap_csv(root / "stats" / strfmt("heatmap_os_%s.csv", tdir.c_str()), ts,
                      result.subjects, false);
    write_heatmap_csv(root / "stats" / strfmt("heatmap_ss_%s.csv", tdir.c_str()), ts,
                      result.subjects, true);
  }

  write_table1(root / "tables" / "table1.csv", result);
  write_table2(root / "tables" / "table2.csv", result);
}

}  // namespace cg
