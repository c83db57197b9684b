#include "cortigraph/phantom.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "cortigraph/common.hpp"
#include "cortigraph/volume_io.hpp"

namespace cg {

namespace {

double surface_z(const PhantomParams& p, std::uint32_t x, std::uint32_t y) {
  const double z0 = std::floor(p.dims[2] / 2.0) + 0.5;
  const double two_pi = 2.0 * std::numbers::pi;
  const double sx = std::sin(two_pi * p.freq_x * (x + 0.5) / p.dims[0] + p.phase_x);
  const double sy = std::sin(two_pi * p.freq_y * (y + 0.5) / p.dims[1] + p.phase_y);
  return z0 + p.amplitude * sx * sy;
}

bool connected26(const std::vector<Voxel>& voxels, const Dims& dims) {
  if (voxels.empty()) return false;
  const std::size_t nx = dims[0], ny = dims[1], nz = dims[2];
  std::vector<std::uint8_t> grid(nx * ny * nz, 0);
  auto at = [&](std::uint32_t x, std::uint32_t y, std::uint32_t z) -> std::uint8_t& {
    return grid[(static_cast<std::size_t>(z) * ny + y) * nx + x];
  };
  for (const auto& v : voxels) at(v.x, v.y, v.z) = 1;

  std::vector<Voxel> stack{voxels.front()};
  at(voxels.front().x, voxels.front().y, voxels.front().z) = 2;
  std::size_t visited = 0;
  while (!stack.empty()) {
    const Voxel v = stack.back();
    stack.pop_back();
    ++visited;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const std::int64_t x = static_cast<std::int64_t>(v.x) + dx;
          const std::int64_t y = static_cast<std::int64_t>(v.y) + dy;
          const std::int64_t z = static_cast<std::int64_t>(v.z) + dz;
          if (x < 0 || y < 0 || z < 0 || x >= static_cast<std::int64_t>(nx) ||
              y >= static_cast<std::int64_t>(ny) || z >= static_cast<std::int64_t>(nz))
            continue;
          auto& cell = at(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y),
                          static_cast<std::uint32_t>(z));
          if (cell == 1) {
            cell = 2;
            stack.push_back({static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y),
                             static_cast<std::uint32_t>(z)});
          }
        }
  }
  return visited == voxels.size();
}

}  // namespace

void PhantomParams::validate() const {
  for (int a = 0; a < 3; ++a)
    if (dims[a] == 0) fail("phantom dims must be positive");
  if (thickness < 1) fail("phantom thickness must be >= 1");
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
    fail("phantom amplitude must be finite and >= 0, got %g", amplitude);
  if (!(freq_x > 0.0) || !(freq_y > 0.0) || !std::isfinite(freq_x) || !std::isfinite(freq_y))
    fail("phantom frequencies must be finite and positive");
  if (!std::isfinite(phase_x) || !std::isfinite(phase_y) || !std::isfinite(phase_jitter) ||
      phase_jitter < 0.0)
    fail("phantom phases must be finite (jitter >= 0)");
  if (!(noise >= 0.0 && noise <= 0.05)) fail("phantom noise must lie in [0, 0.05], got %g", noise);

  const double z0 = std::floor(dims[2] / 2.0) + 0.5;
  const double reach = amplitude + thickness / 2.0 + (noise > 0.0 ? 1.0 : 0.0);
  if (z0 - reach < 0.0 || z0 + reach > static_cast<double>(dims[2]))
    fail("phantom slab does not fit the grid: mid %g, reach %g, nz %u", z0, reach, dims[2]);
}

VoxelMask generate_phantom(const PhantomParams& params) {
  params.validate();
  const double half = params.thickness / 2.0;

  std::vector<Voxel> base;
  for (std::uint32_t z = 0; z < params.dims[2]; ++z)
    for (std::uint32_t y = 0; y < params.dims[1]; ++y)
      for (std::uint32_t x = 0; x < params.dims[0]; ++x)
        if (std::abs((z + 0.5) - surface_z(params, x, y)) <= half) base.push_back({x, y, z});

  if (base.empty()) fail("phantom parameters produce an empty mask");
  if (!connected26(base, params.dims))
    fail("phantom slab is not 26-connected; reduce amplitude or frequencies");

  VoxelMask mask;
  mask.dims = params.dims;
  mask.spacing = {1.0, 1.0, 1.0};
  mask.tag = "phantom";

  if (params.noise == 0.0) {
    mask.voxels = std::move(base);
  } else {
    for (std::uint32_t z = 0; z < params.dims[2]; ++z)
      for (std::uint32_t y = 0; y < params.dims[1]; ++y)
        for (std::uint32_t x = 0; x < params.dims[0]; ++x) {
          const double d = std::abs((z + 0.5) - surface_z(params, x, y));
          bool in = d <= half;
          const bool shell = d <= half + 1.0 && d > half - 1.0;
          if (shell) {
            const std::size_t flat =
                (static_cast<std::size_t>(z) * params.dims[1] + y) * params.dims[0] + x;
            Rng rng(mix_seed(params.seed, flat));
            if (rng.next_double() < params.noise) in = !in;
          }
          if (in) mask.voxels.push_back({x, y, z});
        }
    if (mask.voxels.empty()) fail("phantom noise removed every voxel");
  }

  validate_and_canonicalize(mask);
  return mask;
}

std::vector<PhantomSubject> generate_cohort(const PhantomParams& class_a,
                                            const PhantomParams& class_b,
                                            std::size_t n_per_class, std::uint64_t seed,
                                            const std::string& label_a,
                                            const std::string& label_b) {
  if (n_per_class < 2) fail("cohort needs at least two subjects per class");
  if (label_a.empty() || label_b.empty() || label_a == label_b)
    fail("cohort class labels must be distinct and non-empty");

  std::vector<PhantomSubject> subjects;
  subjects.reserve(2 * n_per_class);
  for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
    const bool is_a = i < n_per_class;
    PhantomParams p = is_a ? class_a : class_b;
    Rng rng(mix_seed(seed, i));
    p.phase_x += p.phase_jitter * (2.0 * rng.next_double() - 1.0);
    p.phase_y += p.phase_jitter * (2.0 * rng.next_double() - 1.0);
    p.seed = mix_seed(seed, i, 0x9E);

    PhantomSubject s;
    s.class_label = is_a ? label_a : label_b;
    s.id = strfmt("%s%02zu", s.class_label.c_str(), (is_a ? i : i - n_per_class) + 1);
    s.mask = generate_phantom(p);
    s.mask.tag = s.id;
    subjects.push_back(std::move(s));
  }
  return subjects;
}

}  // namespace cg
