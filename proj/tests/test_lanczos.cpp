#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "cortigraph/graph_build.hpp"
#include "cortigraph/laplacian.hpp"
#include "cortigraph/spectral/lanczos.hpp"
#include "test_support.hpp"

using namespace cg;

namespace {

double residual(const SparseSymLaplacian& L, const EigenpairSet& es, std::size_t j) {
  std::vector<double> y(L.n);
  laplacian_matvec_serial(L, es.vec(j), y.data());
  double r = 0;
  for (std::size_t i = 0; i < L.n; ++i) {
    const double d = y[i] - es.values[j] * es.vec(j)[i];
    r += d * d;
  }
  return std::sqrt(r);
}

}  // namespace

TEST_CASE("smallest pairs match the dense solver on random masks") {
  Rng rng(641);
  for (int rep = 0; rep < 8; ++rep) {
    const VoxelMask m = ts::random_mask(rng, 6, 5, 5, 0.35 + 0.5 * rng.next_double());
    const VoxelGraph g = build_voxel_graph(m, 26);
    const auto L = normalized_laplacian(g);
    const std::size_t k = std::min<std::size_t>(25, L.n);

    const EigenpairSet sparse = smallest_eigenpairs(L, k);
    const EigenpairSet dense = dense_spectrum(L);
    REQUIRE(sparse.k == k);
    for (std::size_t j = 0; j < k; ++j) {
      CHECK(std::abs(sparse.values[j] - dense.values[j]) < 1e-8);
      CHECK(residual(L, sparse, j) < 1e-7);
    }
    // ascending order
    CHECK(std::is_sorted(sparse.values.begin(), sparse.values.end()));
  }
}

TEST_CASE("repeated runs are bitwise identical") {
  Rng rng(642);
  const VoxelMask m = ts::random_mask(rng, 6, 6, 4, 0.55);
  const auto L = normalized_laplacian(build_voxel_graph(m, 26));
  const std::size_t k = std::min<std::size_t>(12, L.n);

  const EigenpairSet a = smallest_eigenpairs(L, k);
  const EigenpairSet b = smallest_eigenpairs(L, k);
  CHECK(a.values == b.values);
  CHECK(a.vectors == b.vectors);

  LanczosOptions other;
  other.seed = 9001;
  const EigenpairSet c = smallest_eigenpairs(L, k, other);
  // same pairs to tolerance even from a different start stream
  for (std::size_t j = 0; j < k; ++j) CHECK(std::abs(a.values[j] - c.values[j]) < 1e-7);
}

TEST_CASE("multiplicity seven is fully resolved") {
  // complete graph: eigenvalue 8/7 with multiplicity 7
  const auto L = normalized_laplacian(build_voxel_graph(ts::box_mask(2, 2, 2), 26));
  const EigenpairSet es = smallest_eigenpairs(L, 8);
  REQUIRE(es.k == 8);
  CHECK(std::abs(es.values[0]) < 1e-9);
  for (std::size_t j = 1; j < 8; ++j) CHECK(std::abs(es.values[j] - 8.0 / 7.0) < 1e-8);

  // the seven degenerate vectors must still be mutually orthogonal
  for (std::size_t a = 1; a < 8; ++a)
    for (std::size_t b = 1; b < a; ++b) {
      double s = 0;
      for (std::size_t i = 0; i < es.n; ++i) s += es.vec(a)[i] * es.vec(b)[i];
      CHECK(std::abs(s) < 1e-8);
    }
}

TEST_CASE("zero eigenvectors span the components") {
  // two blocks: two zero eigenvalues, eigenvectors constant per component
  VoxelMask m;
  m.dims = {7, 2, 2};
  m.spacing = {1, 1, 1};
  for (std::uint32_t z : {0u, 1u})
    for (std::uint32_t y : {0u, 1u})
      for (std::uint32_t x : {0u, 1u, 5u, 6u}) m.voxels.push_back({x, y, z});
  const VoxelGraph g = build_voxel_graph(m, 26);
  const auto L = normalized_laplacian(g);
  const EigenpairSet es = smallest_eigenpairs(L, 3);
  CHECK(std::abs(es.values[0]) < 1e-9);
  CHECK(std::abs(es.values[1]) < 1e-9);
  CHECK(es.values[2] > 1e-6);
}

TEST_CASE("requesting more pairs than vertices fails") {
  const auto L = normalized_laplacian(build_voxel_graph(ts::box_mask(2, 2, 1), 26));
  CHECK_THROWS_AS(smallest_eigenpairs(L, 5), Error);
  CHECK_THROWS_AS(smallest_eigenpairs(L, 0), Error);
  CHECK(smallest_eigenpairs(L, 4).k == 4);
}

TEST_CASE("canonical sign fixes the eigenvector direction") {
  Rng rng(643);
  const VoxelMask m = ts::random_mask(rng, 5, 5, 4, 0.6);
  const auto L = normalized_laplacian(build_voxel_graph(m, 26));
  const EigenpairSet es = smallest_eigenpairs(L, std::min<std::size_t>(6, L.n));
  for (std::size_t j = 0; j < es.k; ++j) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < es.n; ++i)
      if (std::abs(es.vec(j)[i]) > std::abs(es.vec(j)[arg])) arg = i;
    CHECK(es.vec(j)[arg] > 0.0);
  }
}
