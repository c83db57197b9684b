#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <tuple>
#include <vector>

#include "cortigraph/graph_build.hpp"
#include "cortigraph/laplacian.hpp"
#include "cortigraph/spectral/slicing.hpp"
#include "test_support.hpp"

using namespace cg;

TEST_CASE("inertia counts on the complete graph") {
  // spectrum: {0, 8/7 x7}
  const auto L = normalized_laplacian(build_voxel_graph(ts::box_mask(2, 2, 2), 26));
  CHECK(count_eigenvalues_below(L, -1.0) == 0);
  CHECK(count_eigenvalues_below(L, 0.0) == 0);
  CHECK(count_eigenvalues_below(L, 1e-9) == 1);
  CHECK(count_eigenvalues_below(L, 1.0) == 1);
  CHECK(count_eigenvalues_below(L, 1.2) == 8);
  CHECK(count_eigenvalues_below(L, 2.5) == 8);
}

TEST_CASE("counts are monotone in the shift") {
  Rng rng(23);
  const VoxelMask m = ts::random_mask(rng, 6, 5, 4, 0.6);
  const auto L = normalized_laplacian(build_voxel_graph(m, 26));
  std::size_t prev = 0;
  for (double sigma = -0.1; sigma <= 2.2; sigma += 0.07) {
    const std::size_t c = count_eigenvalues_below(L, sigma);
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(prev == L.n);
}

TEST_CASE("default band histogram matches the dense oracle") {
  Rng rng(71);
  for (int rep = 0; rep < 10; ++rep) {
    const VoxelMask m = ts::random_mask(rng, 6, 6, 4, 0.3 + 0.6 * rng.next_double());
    const auto L = normalized_laplacian(build_voxel_graph(m, 26));
    const BandSpec spec;  // ten bands on [0, 0.1]
    const BandHistogram h = band_histogram(L, spec);
    REQUIRE(h.counts.size() == spec.n_bands);
    CHECK(h.counts == ts::oracle_band_counts(L, spec));
  }
}

TEST_CASE("randomized band layouts match the dense oracle") {
  Rng rng(72);
  for (int rep = 0; rep < 14; ++rep) {
    const VoxelMask m = ts::random_mask(rng, 6, 5, 4, 0.3 + 0.6 * rng.next_double());
    const auto L = normalized_laplacian(build_voxel_graph(m, 26));
    BandSpec spec;
    spec.lo = 0.5 * rng.next_double();
    spec.hi = spec.lo + 0.05 + (2.1 - spec.lo - 0.05) * rng.next_double();
    spec.n_bands = 1 + static_cast<std::size_t>(rng.next_double() * 12);
    const BandHistogram h = band_histogram(L, spec);
    CHECK(h.counts == ts::oracle_band_counts(L, spec));
  }
}

TEST_CASE("whole-spectrum band sweep accounts for every eigenvalue") {
  Rng rng(73);
  const VoxelMask m = ts::random_mask(rng, 5, 5, 5, 0.55);
  const auto L = normalized_laplacian(build_voxel_graph(m, 26));
  BandSpec spec;
  spec.lo = 0.0;
  spec.hi = 2.0;
  spec.n_bands = 8;
  const BandHistogram h = band_histogram(L, spec);
  CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0}) == L.n);
  CHECK(h.total() == L.n);
}

TEST_CASE("zero multiplicity lands in the first band") {
  // two separate blocks plus an isolated voxel: three components
  VoxelMask m;
  m.dims = {9, 2, 2};
  m.spacing = {1, 1, 1};
  for (std::uint32_t z : {0u, 1u})
    for (std::uint32_t y : {0u, 1u})
      for (std::uint32_t x : {0u, 1u, 4u, 5u}) m.voxels.push_back({x, y, z});
  m.voxels.push_back({8, 0, 0});
  std::sort(m.voxels.begin(), m.voxels.end(), [](const Voxel& a, const Voxel& b) {
    return std::tie(a.z, a.y, a.x) < std::tie(b.z, b.y, b.x);
  });
  const VoxelGraph g = build_voxel_graph(m, 26);
  REQUIRE(connected_components(g).count == 3);

  const BandHistogram h = band_histogram(normalized_laplacian(g), BandSpec{});
  CHECK(h.counts[0] >= 3);
}

TEST_CASE("factor reuse and stats plumbing") {
  Rng rng(74);
  const VoxelMask m = ts::random_mask(rng, 6, 6, 5, 0.6);
  const auto L = normalized_laplacian(build_voxel_graph(m, 26));
  SliceStats stats;
  const BandHistogram h = band_histogram(L, BandSpec{}, &stats);
  // 11 boundaries; lo = 0 is answered without factoring
  CHECK(stats.n_factorizations >= h.counts.size() - 1);
  CHECK(stats.n_factorizations <= h.counts.size() + stats.n_perturb_retries + 1);
}

TEST_CASE("histogram csv round trip") {
  ts::TempDir td("slicing_csv");
  BandHistogram a;
  a.spec = BandSpec{0.0, 0.1, 4};
  a.counts = {3, 0, 1, 7};
  a.graph_id = "subj_L";
  BandHistogram b = a;
  b.graph_id = "subj_L_p2";
  b.counts = {1, 1, 0, 2};

  const std::string path = td.file("hist.csv");
  write_band_histogram_csv(path, {a, b});
  const auto back = read_band_histogram_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].graph_id == "subj_L");
  CHECK(back[0].counts == a.counts);
  CHECK(back[1].counts == b.counts);
  CHECK(back[1].spec.n_bands == 4);
  CHECK(back[1].spec.lo == doctest::Approx(0.0));
  CHECK(back[1].spec.hi == doctest::Approx(0.1));

  // divisor column survives the round trip
  a.per_parcel_divisor = 12.0;
  write_band_histogram_csv(path, {a});
  const auto withdiv = read_band_histogram_csv(path);
  REQUIRE(withdiv.size() == 1);
  CHECK(withdiv[0].per_parcel_divisor == doctest::Approx(12.0));
}

TEST_CASE("band spec validation") {
  CHECK_THROWS_AS(band_histogram(SparseSymLaplacian{}, BandSpec{0.2, 0.1, 4}), Error);
  CHECK_THROWS_AS(band_histogram(SparseSymLaplacian{}, BandSpec{0.0, 0.1, 0}), Error);
  BandSpec bad;
  bad.lo = -0.3;
  CHECK_THROWS_AS(bad.validate(), Error);
}
