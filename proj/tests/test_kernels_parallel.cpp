#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "cortigraph/graph_build.hpp"
#include "cortigraph/laplacian.hpp"
#include "cortigraph/parallel.hpp"
#include "cortigraph/parcellation/parcellate.hpp"
#include "cortigraph/phantom.hpp"
#include "cortigraph/prune.hpp"
#include "cortigraph/spectral/slicing.hpp"
#include "test_support.hpp"

using namespace cg;

namespace {

struct ThreadGuard {
  ~ThreadGuard() { set_threads(0); }
};

VoxelMask fixture_mask() {
  PhantomParams p;
  p.dims = {48, 48, 14};
  p.thickness = 3;
  p.amplitude = 2.5;
  p.noise = 0.01;
  p.seed = 4242;
  return generate_phantom(p);
}

}  // namespace

TEST_CASE("graph build is identical across thread counts and vs serial") {
  ThreadGuard tg;
  const VoxelMask m = fixture_mask();

  set_threads(1);
  const VoxelGraph g1 = build_voxel_graph(m, 26);
  set_threads(4);
  const VoxelGraph g4 = build_voxel_graph(m, 26);
  const VoxelGraph gs = build_voxel_graph_serial(m, 26);

  CHECK(g1.offsets == g4.offsets);
  CHECK(g1.neighbors == g4.neighbors);
  CHECK(g4.offsets == gs.offsets);
  CHECK(g4.neighbors == gs.neighbors);
}

TEST_CASE("pruning is identical across thread counts and vs serial") {
  ThreadGuard tg;
  const VoxelGraph g = build_voxel_graph(fixture_mask(), 26);
  const TriangleMesh mesh = ts::plane_mesh(7.3, -5.0, 55.0);

  set_threads(1);
  const PruneResult r1 = prune_edges_by_surface(g, mesh);
  set_threads(4);
  const PruneResult r4 = prune_edges_by_surface(g, mesh);
  const PruneResult rs = prune_edges_by_surface_serial(g, mesh);

  CHECK(r1.removed == r4.removed);
  CHECK(r4.removed == rs.removed);
  CHECK(r1.graph.neighbors == r4.graph.neighbors);
}

TEST_CASE("matvec is bitwise identical across thread counts and vs serial") {
  ThreadGuard tg;
  const auto L = normalized_laplacian(build_voxel_graph(fixture_mask(), 26));
  std::vector<double> x(L.n), y1(L.n), y4(L.n), ys(L.n);
  Rng rng(88);
  for (double& v : x) v = rng.next_double() - 0.5;

  set_threads(1);
  laplacian_matvec(L, x.data(), y1.data());
  set_threads(4);
  laplacian_matvec(L, x.data(), y4.data());
  laplacian_matvec_serial(L, x.data(), ys.data());

  CHECK(y1 == y4);
  CHECK(y4 == ys);
}

TEST_CASE("band histogram is identical across thread counts") {
  ThreadGuard tg;
  const auto L = normalized_laplacian(build_voxel_graph(fixture_mask(), 26));

  set_threads(1);
  const BandHistogram h1 = band_histogram(L, BandSpec{});
  set_threads(4);
  const BandHistogram h4 = band_histogram(L, BandSpec{});
  CHECK(h1.counts == h4.counts);
}

TEST_CASE("parcellation is identical across thread counts") {
  ThreadGuard tg;
  const VoxelGraph g = build_voxel_graph(fixture_mask(), 26);

  set_threads(1);
  const Parcellation p1 = parcellate(g, 600, 5);
  set_threads(4);
  const Parcellation p4 = parcellate(g, 600, 5);
  CHECK(p1.labels == p4.labels);
  CHECK(p1.wcss == p4.wcss);
  CHECK(p1.sizes == p4.sizes);
}

TEST_CASE("blocked reductions are thread-count invariant") {
  ThreadGuard tg;
  // long enough for several blocks, values that expose reassociation
  std::vector<double> x(3 * par::kBlock + 1234), y(x.size());
  Rng rng(19);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = (rng.next_double() - 0.5) * (1.0 + 1e6 * (i % 7 == 0));
    y[i] = rng.next_double() - 0.5;
  }

  set_threads(1);
  const double s1 = par::sum_blocked(x);
  const double d1 = par::dot_blocked(x, y);
  set_threads(4);
  const double s4 = par::sum_blocked(x);
  const double d4 = par::dot_blocked(x, y);
  set_threads(3);
  const double s3 = par::sum_blocked(x);
  const double d3 = par::dot_blocked(x, y);

  CHECK(s1 == s4);
  CHECK(s1 == s3);
  CHECK(d1 == d4);
  CHECK(d1 == d3);

  // and the value is actually a sum: compare against long-double reference
  long double acc = 0.0L;
  for (double v : x) acc += static_cast<long double>(v);
  CHECK(std::abs(s1 - static_cast<double>(acc)) < 1e-6 * (1.0 + std::abs(s1)));
}

TEST_CASE("thread setting round trips") {
  ThreadGuard tg;
  set_threads(2);
  CHECK(threads() == 2);
  set_threads(0);
  CHECK(threads() >= 1);
}
