#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "cortigraph/volume_io.hpp"
#include "test_support.hpp"

using namespace cg;

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("voxtext round trip") {
  ts::TempDir dir("voxio");
  Rng rng(101);
  VoxelMask m = ts::random_mask(rng, 9, 7, 5, 0.4);
  m.spacing = {0.7, 1.25, 2.0};
  const std::string path = dir.file("m.vox");
  save_mask(m, path);

  const VoxelMask back = load_mask(path);
  CHECK(back.dims == m.dims);
  CHECK(back.spacing == m.spacing);
  REQUIRE(back.voxels.size() == m.voxels.size());
  CHECK(back.voxels == m.voxels);
}

TEST_CASE("voxtext accepts comments, blank lines and unsorted voxels") {
  ts::TempDir dir("voxio");
  const std::string path = dir.file("m.vox");
  write_file(path,
             "VOXMASK 1\n"
             "# a comment\n"
             "dims 4 4 4\n"
             "\n"
             "spacing 1 1 1\n"
             "2 2 2\n"
             "0 0 0\n");
  const VoxelMask m = load_mask(path);
  REQUIRE(m.voxels.size() == 2);
  CHECK(m.voxels[0] == Voxel{0, 0, 0});  // canonical (z,y,x) order
  CHECK(m.voxels[1] == Voxel{2, 2, 2});
}

TEST_CASE("voxtext rejects malformed input") {
  ts::TempDir dir("voxio");
  auto expect_error = [&](const char* name, const std::string& content,
                          const std::string& needle) {
    const std::string path = dir.file(name);
    write_file(path, content);
    const std::string msg = error_of([&] { load_mask(path); });
    INFO(name << ": " << msg);
    CHECK(msg.find(needle) != std::string::npos);
  };

  expect_error("header.vox", "VOXMASK 2\ndims 2 2 2\nspacing 1 1 1\n0 0 0\n", "header");
  expect_error("nodims.vox", "VOXMASK 1\nspacing 1 1 1\n0 0 0\n", "dims");
  expect_error("oob.vox", "VOXMASK 1\ndims 2 2 2\nspacing 1 1 1\n0 0 2\n", "outside");
  expect_error("dup.vox", "VOXMASK 1\ndims 2 2 2\nspacing 1 1 1\n0 0 0\n0 0 0\n",
               "duplicate");
  expect_error("trail.vox", "VOXMASK 1\ndims 2 2 2\nspacing 1 1 1\n0 0 0 7\n", "voxel");
  expect_error("empty.vox", "VOXMASK 1\ndims 2 2 2\nspacing 1 1 1\n", "empty");
  expect_error("badspacing.vox", "VOXMASK 1\ndims 2 2 2\nspacing 0 1 1\n0 0 0\n",
               "spacing");
}

TEST_CASE("nifti round trip via uint8 writer") {
  ts::TempDir dir("voxio");
  Rng rng(77);
  VoxelMask m = ts::random_mask(rng, 6, 5, 4, 0.5);
  m.spacing = {0.8, 0.8, 2.5};
  const std::string path = dir.file("m.nii");
  save_mask(m, path);

  const VoxelMask back = load_mask(path);
  CHECK(back.dims == m.dims);
  for (int i = 0; i < 3; ++i)
    CHECK(back.spacing[i] == doctest::Approx(m.spacing[i]).epsilon(1e-6));
  CHECK(back.voxels == m.voxels);
}

TEST_CASE("nifti int16 with swapped byte order") {
  // Handcrafted big-endian header: dim[0] reads as 768 until swapped.
  ts::TempDir dir("voxio");
  std::vector<unsigned char> hdr(352, 0);
  auto put_be16 = [&](std::size_t off, std::uint16_t v) {
    hdr[off] = static_cast<unsigned char>(v >> 8);
    hdr[off + 1] = static_cast<unsigned char>(v & 0xff);
  };
  auto put_be32 = [&](std::size_t off, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
      hdr[off + i] = static_cast<unsigned char>((v >> (24 - 8 * i)) & 0xff);
  };
  auto put_bef = [&](std::size_t off, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_be32(off, bits);
  };
  put_be32(0, 348);     // sizeof_hdr
  put_be16(40, 3);      // dim[0]
  put_be16(42, 2);      // nx
  put_be16(44, 2);      // ny
  put_be16(46, 1);      // nz
  put_be16(70, 4);      // datatype int16
  put_be16(72, 16);     // bitpix
  put_bef(76, 1.0f);    // pixdim[0]
  put_bef(80, 1.5f);    // dx
  put_bef(84, 2.0f);    // dy
  put_bef(88, 2.5f);    // dz
  put_bef(108, 352.0f); // vox_offset
  hdr[344] = 'n'; hdr[345] = '+'; hdr[346] = '1'; hdr[347] = 0;

  // int16 big-endian values: 1, 0, 0, 257
  const unsigned char data[] = {0, 1, 0, 0, 0, 0, 1, 1};
  std::ofstream out(dir.file("be.nii"), std::ios::binary);
  out.write(reinterpret_cast<const char*>(hdr.data()), 352);
  out.write(reinterpret_cast<const char*>(data), sizeof data);
  out.close();

  const VoxelMask m = load_mask(dir.file("be.nii"));
  CHECK(m.dims == Dims{2, 2, 1});
  CHECK(m.spacing[0] == doctest::Approx(1.5));
  CHECK(m.spacing[2] == doctest::Approx(2.5));
  REQUIRE(m.voxels.size() == 2);
  CHECK(m.voxels[0] == Voxel{0, 0, 0});
  CHECK(m.voxels[1] == Voxel{1, 1, 0});
}

TEST_CASE("nifti rejects gzip and unsupported layouts") {
  ts::TempDir dir("voxio");
  write_file(dir.file("a.nii"), std::string("\x1f\x8b", 2) + "rest");
  const std::string msg = error_of([&] { load_mask(dir.file("a.nii")); });
  CHECK(msg.find("gzip") != std::string::npos);

  CHECK_THROWS_AS(load_mask(dir.file("missing.nii")), Error);
}

TEST_CASE("off mesh round trip and degenerate faces") {
  ts::TempDir dir("voxio");
  TriangleMesh mesh = ts::plane_mesh(1.5, 0.0, 3.0);
  const std::string path = dir.file("m.off");
  save_mesh_off(mesh, path);

  MeshLoadStats stats;
  const TriangleMesh back = load_mesh_off(path, &stats);
  CHECK(back.vertices == mesh.vertices);
  CHECK(back.triangles == mesh.triangles);
  CHECK(stats.degenerate_dropped == 0);

  write_file(dir.file("degen.off"),
             "OFF\n4 3 0\n0 0 0\n1 0 0\n0 1 0\n2 0 0\n"
             "3 0 1 2\n"
             "3 0 1 1\n"    // repeated index
             "3 0 1 3\n");  // collinear, zero area
  const TriangleMesh d = load_mesh_off(dir.file("degen.off"), &stats);
  CHECK(d.triangles.size() == 1);
  CHECK(stats.degenerate_dropped == 2);
}

TEST_CASE("off mesh rejects malformed input") {
  ts::TempDir dir("voxio");
  write_file(dir.file("quad.off"), "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n");
  CHECK_THROWS_AS(load_mesh_off(dir.file("quad.off")), Error);

  write_file(dir.file("oor.off"), "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 5\n");
  CHECK_THROWS_AS(load_mesh_off(dir.file("oor.off")), Error);
}

TEST_CASE("mask format detection by extension") {
  ts::TempDir dir("voxio");
  VoxelMask m = ts::box_mask(2, 2, 1);
  save_mask(m, dir.file("a.vox"));
  save_mask(m, dir.file("a.nii"));
  CHECK(load_mask(dir.file("a.vox")).voxels == m.voxels);
  CHECK(load_mask(dir.file("a.nii")).voxels == m.voxels);

  // explicit format overrides the extension
  save_mask(m, dir.file("b.dat"), MaskFormat::VoxText);
  CHECK(load_mask(dir.file("b.dat"), MaskFormat::VoxText).voxels == m.voxels);
}
