// Timing comparison of the parallel kernels against their serial reference
// implementations. Not a test; run manually:
//   ./bench_kernels [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "cortigraph/common.hpp"
#include "cortigraph/graph_build.hpp"
#include "cortigraph/laplacian.hpp"
#include "cortigraph/parallel.hpp"
#include "cortigraph/parcellation/embedding.hpp"
#include "cortigraph/parcellation/kmeans.hpp"
#include "cortigraph/phantom.hpp"
#include "cortigraph/prune.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  const auto t0 = Clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-22s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

cg::TriangleMesh plane_mesh(double z, double extent) {
  cg::TriangleMesh m;
  m.vertices = {{-1.0, -1.0, z}, {extent, -1.0, z}, {extent, extent, z}, {-1.0, extent, z}};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) cg::set_threads(std::atoi(argv[1]));
  std::printf("threads: %d\n", cg::threads());
  std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  cg::PhantomParams pp;
  pp.dims = {128, 128, 24};
  pp.amplitude = 5.0;
  const cg::VoxelMask mask = cg::generate_phantom(pp);
  std::printf("phantom: %zu voxels\n", mask.voxels.size());

  row("graph build 26",
      time_ms([&] { cg::build_voxel_graph_serial(mask); }, 3),
      time_ms([&] { cg::build_voxel_graph(mask); }, 3));

  const cg::VoxelGraph g = cg::build_voxel_graph(mask);
  const cg::SparseSymLaplacian L = cg::normalized_laplacian(g);
  std::vector<double> x(L.n, 1.0), y(L.n);
  cg::Rng rng(7);
  for (auto& v : x) v = rng.next_double();
  row("laplacian matvec",
      time_ms([&] { cg::laplacian_matvec_serial(L, x.data(), y.data()); }, 20),
      time_ms([&] { cg::laplacian_matvec(L, x.data(), y.data()); }, 20));

  const cg::TriangleMesh mesh = plane_mesh(12.2, 200.0);
  row("surface prune",
      time_ms([&] { cg::prune_edges_by_surface_serial(g, mesh); }, 1),
      time_ms([&] { cg::prune_edges_by_surface(g, mesh); }, 1));

  cg::Embedding emb;
  emb.n = 20000;
  emb.dim = 8;
  emb.points.resize(emb.n * emb.dim);
  for (auto& v : emb.points) v = rng.next_double();
  cg::KMeansOptions ko;
  ko.restarts = 2;
  row("k-means",
      time_ms([&] { cg::kmeans_cluster_reference(emb, 16, 11, ko); }, 1),
      time_ms([&] { cg::kmeans_cluster(emb, 16, 11, ko); }, 1));

  return 0;
}
