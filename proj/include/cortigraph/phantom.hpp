#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cortigraph/voxel_mask.hpp"

namespace cg {

// Synthetic cortical-sheet phantom: a folded slab of the given thickness
// around the surface
//   s(x,y) = z0 + A sin(2 pi fx (x+0.5)/nx + px) sin(2 pi fy (y+0.5)/ny + py)
// with z0 the grid's mid plane. A voxel belongs to the mask when its center
// lies within thickness/2 of s. Optional boundary noise flips voxels inside
// a one-voxel shell around the slab faces.
struct PhantomParams {
  Dims dims{64, 64, 16};
  std::uint32_t thickness = 3;  // slab thickness in voxels
  double amplitude = 3.0;       // fold height in voxels
  double freq_x = 2.0;          // folds along x across the grid
  double freq_y = 1.5;
  double phase_x = 0.0;
  double phase_y = 0.0;
  double phase_jitter = 0.0;  // per-subject phase spread, radians
  double noise = 0.0;         // boundary flip probability, [0, 0.05]
  std::uint64_t seed = 42;

  void validate() const;
};

// Deterministic in params. The noise-free slab must form a single
// 26-connected component or generation fails.
VoxelMask generate_phantom(const PhantomParams& params);

struct PhantomSubject {
  std::string id;  // "A01".. / "B01"..
  std::string class_label;
  VoxelMask mask;
};

// 2 * n_per_class subjects, one mask each. Within-class variation comes
// from each class's phase_jitter plus per-subject noise seeds.
std::vector<PhantomSubject> generate_cohort(const PhantomParams& class_a,
                                            const PhantomParams& class_b,
                                            std::size_t n_per_class,
                                            std::uint64_t seed,
                                            const std::string& label_a = "A",
                                            const std::string& label_b = "B");

}  // namespace cg
