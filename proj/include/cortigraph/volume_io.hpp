#pragma once

#include <cstddef>
#include <string>

#include "cortigraph/mesh.hpp"
#include "cortigraph/voxel_mask.hpp"

namespace cg {

enum class MaskFormat { Auto, VoxText, Nifti };

// VOXTEXT is a line-oriented text format:
//   VOXMASK 1
//   dims <dx> <dy> <dz>
//   spacing <sx> <sy> <sz>
//   <x> <y> <z>        (one in-mask voxel per line)
// Blank lines and lines starting with '#' are ignored.
//
// NIfTI support is deliberately minimal: uncompressed single-file .nii,
// datatypes uint8 / int16 / int32, any nonzero value is in-mask. Spacing is
// taken from pixdim. Gzipped input is rejected with a pointer to gunzip.
VoxelMask load_mask(const std::string& path, MaskFormat format = MaskFormat::Auto);
void save_mask(const VoxelMask& mask, const std::string& path,
               MaskFormat format = MaskFormat::Auto);

struct MeshLoadStats {
  std::size_t degenerate_dropped = 0;
};

// OFF triangle mesh. Faces must be triangles; degenerate ones (repeated
// vertex index or exactly zero area) are dropped and counted in stats.
TriangleMesh load_mesh_off(const std::string& path, MeshLoadStats* stats = nullptr);
void save_mesh_off(const TriangleMesh& mesh, const std::string& path);

}  // namespace cg
