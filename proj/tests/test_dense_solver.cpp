#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "cortigraph/graph_build.hpp"
#include "cortigraph/laplacian.hpp"
#include "cortigraph/spectral/dense_solver.hpp"
#include "test_support.hpp"

using namespace cg;

namespace {

double pair_residual(const SparseSymLaplacian& L, const EigenpairSet& es, std::size_t j) {
  std::vector<double> y(L.n);
  laplacian_matvec_serial(L, es.vec(j), y.data());
  double r = 0;
  for (std::size_t i = 0; i < L.n; ++i) {
    const double d = y[i] - es.values[j] * es.vec(j)[i];
    r += d * d;
  }
  return std::sqrt(r);
}

double pair_dot(const EigenpairSet& es, std::size_t a, std::size_t b) {
  double s = 0;
  for (std::size_t i = 0; i < es.n; ++i) s += es.vec(a)[i] * es.vec(b)[i];
  return s;
}

}  // namespace

TEST_CASE("two connected voxels give {0, 2}") {
  const auto L = normalized_laplacian(build_voxel_graph(ts::box_mask(2, 1, 1), 26));
  const EigenpairSet es = dense_spectrum(L);
  REQUIRE(es.k == 2);
  CHECK(std::abs(es.values[0]) < 1e-10);
  CHECK(std::abs(es.values[1] - 2.0) < 1e-10);
}

TEST_CASE("path of three matches the closed form") {
  const auto L = normalized_laplacian(build_voxel_graph(ts::box_mask(1, 1, 3), 6));
  const EigenpairSet es = dense_spectrum(L);
  REQUIRE(es.k == 3);
  CHECK(std::abs(es.values[0] - 0.0) < 1e-10);
  CHECK(std::abs(es.values[1] - 1.0) < 1e-10);
  CHECK(std::abs(es.values[2] - 2.0) < 1e-10);
}

TEST_CASE("complete graph on eight voxels") {
  // K8: eigenvalue 0 once, 8/7 with multiplicity 7
  const auto L = normalized_laplacian(build_voxel_graph(ts::box_mask(2, 2, 2), 26));
  const EigenpairSet es = dense_spectrum(L);
  REQUIRE(es.k == 8);
  CHECK(std::abs(es.values[0]) < 1e-10);
  for (std::size_t j = 1; j < 8; ++j) CHECK(std::abs(es.values[j] - 8.0 / 7.0) < 1e-10);
}

TEST_CASE("random masks: residuals, orthogonality, bounds, zero multiplicity") {
  Rng rng(907);
  for (int rep = 0; rep < 8; ++rep) {
    const VoxelMask m = ts::random_mask(rng, 5, 5, 4, 0.3 + 0.5 * rng.next_double());
    const VoxelGraph g = build_voxel_graph(m, 26);
    const auto L = normalized_laplacian(g);
    const EigenpairSet es = dense_spectrum(L);
    REQUIRE(es.k == L.n);

    for (std::size_t j = 0; j < es.k; ++j) {
      CHECK(es.values[j] >= -1e-10);
      CHECK(es.values[j] <= 2.0 + 1e-10);
      if (j > 0) CHECK(es.values[j] >= es.values[j - 1]);
      CHECK(pair_residual(L, es, j) < 1e-9);
      CHECK(std::abs(pair_dot(es, j, j) - 1.0) < 1e-9);
      if (j > 0) CHECK(std::abs(pair_dot(es, j, j - 1)) < 1e-8);
    }

    std::size_t zeros = 0;
    while (zeros < es.k && es.values[zeros] < 1e-8) ++zeros;
    CHECK(zeros == connected_components(g).count);
  }
}

TEST_CASE("isolated voxels contribute zeros") {
  VoxelMask m;
  m.dims = {9, 1, 1};
  m.spacing = {1, 1, 1};
  m.voxels = {{0, 0, 0}, {4, 0, 0}, {8, 0, 0}};
  const auto L = normalized_laplacian(build_voxel_graph(m, 26));
  const EigenpairSet es = dense_spectrum(L);
  REQUIRE(es.k == 3);
  for (double v : es.values) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("cap refuses oversized problems") {
  const auto big = normalized_laplacian(
      build_voxel_graph(ts::box_mask(1, 1, kDenseSpectrumCap + 1), 6));
  CHECK_THROWS_AS(dense_spectrum(big), Error);

  const auto small = normalized_laplacian(build_voxel_graph(ts::box_mask(2, 2, 2), 26));
  CHECK_THROWS_AS(dense_spectrum(small, 4), Error);
  CHECK(dense_spectrum(small, 8).k == 8);
}

TEST_CASE("sturm counts agree with the computed spectrum") {
  Rng rng(55);
  const VoxelMask m = ts::random_mask(rng, 5, 4, 4, 0.6);
  const auto L = normalized_laplacian(build_voxel_graph(m, 26));
  const std::size_t n = L.n;

  // build the dense matrix, tridiagonalize, compare the Sturm count at
  // assorted shifts with a direct count over the dense eigenvalues
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::uint64_t p = L.offsets[i]; p < L.offsets[i + 1]; ++p)
      a[L.cols[p] * n + i] = L.values[p];
  std::vector<double> d, e;
  householder_tridiagonalize(a, n, d, e);

  const EigenpairSet es = dense_spectrum(L);
  for (double sigma : {-0.5, 0.0, 1e-7, 0.3, 0.9, 1.0, 1.5, 2.0, 2.5}) {
    std::size_t direct = 0;
    for (double v : es.values)
      if (v < sigma) ++direct;
    const std::size_t sturm = sturm_count_below(d, e, n, sigma);
    // eigenvalues within round-off of sigma can land on either side, so
    // accept anything between the two one-sided direct counts
    std::size_t direct_wide = 0;
    for (double v : es.values)
      if (v < sigma + 1e-9) ++direct_wide;
    CHECK(sturm >= std::min(direct, direct_wide));
    CHECK(sturm <= std::max(direct, direct_wide));
  }
}
