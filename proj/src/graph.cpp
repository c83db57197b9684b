#include "cortigraph/graph.hpp"

#include <algorithm>
#include <fstream>

namespace cg {

bool VoxelGraph::has_edge(std::uint32_t a, std::uint32_t b) const {
  auto r = row(a);
  return std::binary_search(r.begin(), r.end(), b);
}

void validate_graph(const VoxelGraph& g) {
  std::size_t n = g.coords.size();
  if (g.offsets.size() != n + 1) fail("graph '%s': offsets size mismatch", g.tag.c_str());
  if (g.offsets[0] != 0 || g.offsets[n] != g.neighbors.size())
    fail("graph '%s': offsets do not span the neighbor array", g.tag.c_str());
  if (g.neighbors.size() % 2 != 0)
    fail("graph '%s': odd directed edge count", g.tag.c_str());
  for (std::size_t v = 0; v < n; ++v) {
    if (g.offsets[v] > g.offsets[v + 1])
      fail("graph '%s': offsets not monotone at %zu", g.tag.c_str(), v);
    auto r = g.row(v);
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i] >= n) fail("graph '%s': neighbor out of range at vertex %zu", g.tag.c_str(), v);
      if (r[i] == v) fail("graph '%s': self-loop at vertex %zu", g.tag.c_str(), v);
      if (i > 0 && r[i - 1] >= r[i])
        fail("graph '%s': row %zu not sorted strictly ascending", g.tag.c_str(), v);
      if (!g.has_edge(r[i], static_cast<std::uint32_t>(v)))
        fail("graph '%s': edge (%zu, %u) missing its reverse", g.tag.c_str(), v, r[i]);
    }
  }
}

VoxelGraph extract_subgraph(const VoxelGraph& g, std::span<const std::uint32_t> vertex_ids) {
  std::size_t n = g.n_vertices();
  std::size_t m = vertex_ids.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (vertex_ids[i] >= n) fail("extract_subgraph: vertex id %u out of range", vertex_ids[i]);
    if (i > 0 && vertex_ids[i - 1] >= vertex_ids[i])
      fail("extract_subgraph: vertex ids must be sorted strictly ascending");
  }
  VoxelGraph sub;
  sub.spacing = g.spacing;
  sub.tag = g.tag;
  sub.coords.resize(m);
  sub.offsets.assign(m + 1, 0);
  auto new_id = [&](std::uint32_t old) -> std::int64_t {
    auto it = std::lower_bound(vertex_ids.begin(), vertex_ids.end(), old);
    if (it == vertex_ids.end() || *it != old) return -1;
    return it - vertex_ids.begin();
  };
  for (std::size_t i = 0; i < m; ++i) {
    sub.coords[i] = g.coords[vertex_ids[i]];
    std::uint64_t deg = 0;
    for (std::uint32_t nb : g.row(vertex_ids[i]))
      if (new_id(nb) >= 0) ++deg;
    sub.offsets[i + 1] = deg;
  }
  for (std::size_t i = 0; i < m; ++i) sub.offsets[i + 1] += sub.offsets[i];
  sub.neighbors.resize(sub.offsets[m]);
  for (std::size_t i = 0; i < m; ++i) {
    std::uint64_t at = sub.offsets[i];
    for (std::uint32_t nb : g.row(vertex_ids[i])) {
      std::int64_t id = new_id(nb);
      if (id >= 0) sub.neighbors[at++] = static_cast<std::uint32_t>(id);
    }
  }
  return sub;
}

ComponentLabels connected_components(const VoxelGraph& g) {
  std::size_t n = g.n_vertices();
  ComponentLabels out;
  out.labels.assign(n, 0xffffffffu);
  std::vector<std::uint32_t> queue;
  for (std::size_t start = 0; start < n; ++start) {
    if (out.labels[start] != 0xffffffffu) continue;
    std::uint32_t label = out.count++;
    std::uint64_t size = 0;
    queue.clear();
    queue.push_back(static_cast<std::uint32_t>(start));
    out.labels[start] = label;
    while (!queue.empty()) {
      std::uint32_t v = queue.back();
      queue.pop_back();
      ++size;
      for (std::uint32_t nb : g.row(v)) {
        if (out.labels[nb] == 0xffffffffu) {
          out.labels[nb] = label;
          queue.push_back(nb);
        }
      }
    }
    out.sizes.push_back(size);
  }
  return out;
}

namespace {

template <class T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void read_pod(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void save_graph_grf(const VoxelGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write '%s'", path.c_str());
  out.write("GRF1", 4);
  write_pod(out, static_cast<std::uint64_t>(g.n_vertices()));
  write_pod(out, static_cast<std::uint64_t>(g.neighbors.size()));
  out.write(reinterpret_cast<const char*>(g.offsets.data()),
            static_cast<std::streamsize>(g.offsets.size() * sizeof(std::uint64_t)));
  out.write(reinterpret_cast<const char*>(g.neighbors.data()),
            static_cast<std::streamsize>(g.neighbors.size() * sizeof(std::uint32_t)));
  for (const Voxel& v : g.coords) {
    write_pod(out, v.x);
    write_pod(out, v.y);
    write_pod(out, v.z);
  }
  if (!out) fail("write failed on '%s'", path.c_str());
}

VoxelGraph load_graph_grf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open '%s'", path.c_str());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "GRF1") fail("'%s': not a GRF v1 file", path.c_str());
  std::uint64_t n = 0, m = 0;
  read_pod(in, n);
  read_pod(in, m);
  if (!in) fail("'%s': truncated GRF header", path.c_str());
  VoxelGraph g;
  auto pos = path.find_last_of("/\\");
  g.tag = pos == std::string::npos ? path : path.substr(pos + 1);
  g.offsets.resize(n + 1);
  g.neighbors.resize(m);
  g.coords.resize(n);
  in.read(reinterpret_cast<char*>(g.offsets.data()),
          static_cast<std::streamsize>((n + 1) * sizeof(std::uint64_t)));
  in.read(reinterpret_cast<char*>(g.neighbors.data()),
          static_cast<std::streamsize>(m * sizeof(std::uint32_t)));
  for (std::uint64_t i = 0; i < n; ++i) {
    read_pod(in, g.coords[i].x);
    read_pod(in, g.coords[i].y);
    read_pod(in, g.coords[i].z);
  }
  if (!in) fail("'%s': truncated GRF payload", path.c_str());
  validate_graph(g);
  return g;
}

void save_graph_json(const VoxelGraph& g, const std::string& path) {
  if (g.n_vertices() > kGraphJsonMaxVertices)
    fail("JSON graph export limited to %zu vertices, graph has %zu", kGraphJsonMaxVertices,
         g.n_vertices());
  std::ofstream out(path);
  if (!out) fail("cannot write '%s'", path.c_str());
  out << "{\n  \"n_vertices\": " << g.n_vertices() << ",\n  \"n_edges\": " << g.n_edges()
      << ",\n  \"spacing\": [" << strfmt("%.17g, %.17g, %.17g", g.spacing[0], g.spacing[1],
                                         g.spacing[2])
      << "],\n  \"coords\": [";
  for (std::size_t i = 0; i < g.coords.size(); ++i) {
    out << (i ? "," : "") << '[' << g.coords[i].x << ',' << g.coords[i].y << ','
        << g.coords[i].z << ']';
  }
  out << "],\n  \"adjacency\": [";
  for (std::size_t v = 0; v < g.n_vertices(); ++v) {
    out << (v ? "," : "") << '[';
    auto r = g.row(v);
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << ']';
  }
  out << "]\n}\n";
  if (!out) fail("write failed on '%s'", path.c_str());
}

}  // namespace cg
