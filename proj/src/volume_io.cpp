#include "cortigraph/volume_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace cg {

void validate_and_canonicalize(VoxelMask& mask) {
  if (mask.dims[0] == 0 || mask.dims[1] == 0 || mask.dims[2] == 0)
    fail("mask '%s': dims must be positive, got %u x %u x %u", mask.tag.c_str(),
         mask.dims[0], mask.dims[1], mask.dims[2]);
  for (int a = 0; a < 3; ++a)
    if (!(mask.spacing[a] > 0.0) || !std::isfinite(mask.spacing[a]))
      fail("mask '%s': spacing[%d] = %g is not positive and finite", mask.tag.c_str(), a,
           mask.spacing[a]);
  if (mask.voxels.empty()) fail("mask '%s': empty mask", mask.tag.c_str());
  for (const Voxel& v : mask.voxels)
    if (!mask.in_bounds(v))
      fail("mask '%s': voxel (%u, %u, %u) outside dims %u x %u x %u", mask.tag.c_str(),
           v.x, v.y, v.z, mask.dims[0], mask.dims[1], mask.dims[2]);
  std::sort(mask.voxels.begin(), mask.voxels.end(), voxel_less_zyx);
  auto dup = std::adjacent_find(mask.voxels.begin(), mask.voxels.end());
  if (dup != mask.voxels.end())
    fail("mask '%s': duplicate voxel (%u, %u, %u)", mask.tag.c_str(), dup->x, dup->y,
         dup->z);
}

namespace {

std::string basename_of(const std::string& path) {
  auto pos = path.find_last_of("/\\");
  return pos == std::string::npos ? path : path.substr(pos + 1);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<char> read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open '%s'", path.c_str());
  in.seekg(0, std::ios::end);
  auto len = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<char> buf(static_cast<std::size_t>(len));
  if (len > 0) in.read(buf.data(), len);
  if (!in) fail("read failed on '%s'", path.c_str());
  return buf;
}

VoxelMask load_voxtext(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '%s'", path.c_str());
  VoxelMask mask;
  mask.tag = basename_of(path);

  auto next_line = [&](std::string& line) -> bool {
    while (std::getline(in, line)) {
      std::size_t i = line.find_first_not_of(" \t\r");
      if (i == std::string::npos) continue;
      if (line[i] == '#') continue;
      if (i > 0 || line.back() == '\r') {
        std::size_t j = line.find_last_not_of(" \t\r");
        line = line.substr(i, j - i + 1);
      }
      return true;
    }
    return false;
  };

  std::string line;
  if (!next_line(line)) fail("'%s': missing VOXMASK header", path.c_str());
  {
    std::istringstream ss(line);
    std::string word;
    int version = -1;
    ss >> word >> version;
    if (word != "VOXMASK" || version != 1)
      fail("'%s': expected 'VOXMASK 1' header, got '%s'", path.c_str(), line.c_str());
  }
  if (!next_line(line)) fail("'%s': missing dims line", path.c_str());
  {
    std::istringstream ss(line);
    std::string word;
    long long dx = -1, dy = -1, dz = -1;
    ss >> word >> dx >> dy >> dz;
    if (word != "dims" || ss.fail() || dx < 1 || dy < 1 || dz < 1 || dx > 0xffffffffLL ||
        dy > 0xffffffffLL || dz > 0xffffffffLL)
      fail("'%s': bad dims line '%s'", path.c_str(), line.c_str());
    mask.dims = {static_cast<std::uint32_t>(dx), static_cast<std::uint32_t>(dy),
                 static_cast<std::uint32_t>(dz)};
  }
  if (!next_line(line)) fail("'%s': missing spacing line", path.c_str());
  {
    std::istringstream ss(line);
    std::string word;
    double sx = 0, sy = 0, sz = 0;
    ss >> word >> sx >> sy >> sz;
    if (word != "spacing" || ss.fail())
      fail("'%s': bad spacing line '%s'", path.c_str(), line.c_str());
    mask.spacing = {sx, sy, sz};
  }
  while (next_line(line)) {
    std::istringstream ss(line);
    long long x = -1, y = -1, z = -1;
    ss >> x >> y >> z;
    std::string rest;
    if (ss.fail() || (ss >> rest) || x < 0 || y < 0 || z < 0)
      fail("'%s': bad voxel line '%s'", path.c_str(), line.c_str());
    mask.voxels.push_back({static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y),
                           static_cast<std::uint32_t>(z)});
  }
  validate_and_canonicalize(mask);
  return mask;
}

void save_voxtext(const VoxelMask& mask, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write '%s'", path.c_str());
  out << "VOXMASK 1\n";
  out << "dims " << mask.dims[0] << ' ' << mask.dims[1] << ' ' << mask.dims[2] << '\n';
  out << strfmt("spacing %.17g %.17g %.17g\n", mask.spacing[0], mask.spacing[1],
                mask.spacing[2]);
  for (const Voxel& v : mask.voxels) out << v.x << ' ' << v.y << ' ' << v.z << '\n';
  if (!out) fail("write failed on '%s'", path.c_str());
}

// The handful of NIfTI-1 header fields we care about, by byte offset.
constexpr std::size_t kNiftiHeaderSize = 348;
constexpr std::size_t kOffDim = 40;       // int16[8]
constexpr std::size_t kOffDatatype = 70;  // int16
constexpr std::size_t kOffBitpix = 72;    // int16
constexpr std::size_t kOffPixdim = 76;    // float[8]
constexpr std::size_t kOffVoxOffset = 108;  // float
constexpr std::size_t kOffMagic = 344;      // char[4]

template <class T>
T load_at(const std::vector<char>& buf, std::size_t off, bool swap) {
  T v;
  std::memcpy(&v, buf.data() + off, sizeof(T));
  if (swap) {
    char* p = reinterpret_cast<char*>(&v);
    std::reverse(p, p + sizeof(T));
  }
  return v;
}

VoxelMask load_nifti(const std::string& path) {
  std::vector<char> buf = read_all(path);
  if (buf.size() >= 2 && static_cast<unsigned char>(buf[0]) == 0x1f &&
      static_cast<unsigned char>(buf[1]) == 0x8b)
    fail("'%s' is gzip-compressed; decompress to a plain .nii first", path.c_str());
  if (buf.size() < kNiftiHeaderSize + 4)
    fail("'%s': too short for a NIfTI-1 header", path.c_str());

  bool swap = false;
  std::int16_t ndim = load_at<std::int16_t>(buf, kOffDim, false);
  if (ndim < 1 || ndim > 7) {
    swap = true;
    ndim = load_at<std::int16_t>(buf, kOffDim, true);
    if (ndim < 1 || ndim > 7)
      fail("'%s': dim[0] invalid in both byte orders", path.c_str());
  }
  std::int32_t sizeof_hdr = load_at<std::int32_t>(buf, 0, swap);
  if (sizeof_hdr != 348) fail("'%s': sizeof_hdr = %d, not a NIfTI-1 file", path.c_str(), sizeof_hdr);
  char magic[4];
  std::memcpy(magic, buf.data() + kOffMagic, 4);
  if (std::strncmp(magic, "n+1", 3) != 0 && std::strncmp(magic, "ni1", 3) != 0)
    fail("'%s': bad magic, not a NIfTI-1 file", path.c_str());
  if (std::strncmp(magic, "ni1", 3) == 0)
    fail("'%s': two-file NIfTI (.hdr/.img) is not supported", path.c_str());

  if (ndim < 3) fail("'%s': need 3 spatial dimensions, dim[0] = %d", path.c_str(), ndim);
  std::int64_t d[8] = {0};
  for (int i = 0; i < 8; ++i)
    d[i] = load_at<std::int16_t>(buf, kOffDim + 2 * static_cast<std::size_t>(i), swap);
  for (int i = 4; i <= ndim; ++i)
    if (d[i] > 1)
      fail("'%s': volume has %lld frames along dim %d; only 3D masks are supported",
           path.c_str(), static_cast<long long>(d[i]), i);
  if (d[1] < 1 || d[2] < 1 || d[3] < 1)
    fail("'%s': nonpositive spatial dims", path.c_str());

  std::int16_t datatype = load_at<std::int16_t>(buf, kOffDatatype, swap);
  std::int16_t bitpix = load_at<std::int16_t>(buf, kOffBitpix, swap);
  std::size_t elem;
  switch (datatype) {
    case 2: elem = 1; break;   // uint8
    case 4: elem = 2; break;   // int16
    case 8: elem = 4; break;   // int32
    default:
      fail("'%s': unsupported NIfTI datatype %d (supported: uint8=2, int16=4, int32=8)",
           path.c_str(), datatype);
  }
  if (bitpix != static_cast<std::int16_t>(elem * 8))
    fail("'%s': bitpix %d inconsistent with datatype %d", path.c_str(), bitpix, datatype);

  float vox_offset = load_at<float>(buf, kOffVoxOffset, swap);
  std::size_t data_off = static_cast<std::size_t>(vox_offset);
  if (vox_offset < 348.0f || static_cast<float>(data_off) != vox_offset)
    fail("'%s': bad vox_offset %g", path.c_str(), static_cast<double>(vox_offset));

  VoxelMask mask;
  mask.tag = basename_of(path);
  mask.dims = {static_cast<std::uint32_t>(d[1]), static_cast<std::uint32_t>(d[2]),
               static_cast<std::uint32_t>(d[3])};
  for (int a = 0; a < 3; ++a) {
    float s = load_at<float>(buf, kOffPixdim + 4 * static_cast<std::size_t>(a + 1), swap);
    mask.spacing[a] = (s > 0.0f && std::isfinite(s)) ? static_cast<double>(s) : 1.0;
  }

  std::size_t nvox = static_cast<std::size_t>(d[1]) * static_cast<std::size_t>(d[2]) *
                     static_cast<std::size_t>(d[3]);
  if (buf.size() < data_off + nvox * elem)
    fail("'%s': file truncated (%zu bytes, need %zu)", path.c_str(), buf.size(),
         data_off + nvox * elem);

  const char* data = buf.data() + data_off;
  std::size_t idx = 0;
  for (std::uint32_t z = 0; z < mask.dims[2]; ++z)
    for (std::uint32_t y = 0; y < mask.dims[1]; ++y)
      for (std::uint32_t x = 0; x < mask.dims[0]; ++x, ++idx) {
        bool nonzero;
        switch (datatype) {
          case 2:
            nonzero = static_cast<unsigned char>(data[idx]) != 0;
            break;
          case 4:
            nonzero = load_at<std::int16_t>(buf, data_off + idx * 2, swap) != 0;
            break;
          default:
            nonzero = load_at<std::int32_t>(buf, data_off + idx * 4, swap) != 0;
            break;
        }
        if (nonzero) mask.voxels.push_back({x, y, z});
      }
  validate_and_canonicalize(mask);
  return mask;
}

template <class T>
void store_at(std::vector<char>& buf, std::size_t off, T v) {
  std::memcpy(buf.data() + off, &v, sizeof(T));
}

void save_nifti(const VoxelMask& mask, const std::string& path) {
  std::vector<char> hdr(352, 0);  // header + 4 bytes extension flag
  store_at<std::int32_t>(hdr, 0, 348);
  store_at<std::int16_t>(hdr, kOffDim + 0, 3);
  store_at<std::int16_t>(hdr, kOffDim + 2, static_cast<std::int16_t>(mask.dims[0]));
  store_at<std::int16_t>(hdr, kOffDim + 4, static_cast<std::int16_t>(mask.dims[1]));
  store_at<std::int16_t>(hdr, kOffDim + 6, static_cast<std::int16_t>(mask.dims[2]));
  for (std::size_t i = 4; i < 8; ++i)
    store_at<std::int16_t>(hdr, kOffDim + 2 * i, 1);
  store_at<std::int16_t>(hdr, kOffDatatype, 2);  // uint8
  store_at<std::int16_t>(hdr, kOffBitpix, 8);
  store_at<float>(hdr, kOffPixdim, 1.0f);
  for (int a = 0; a < 3; ++a)
    store_at<float>(hdr, kOffPixdim + 4 * static_cast<std::size_t>(a + 1),
                    static_cast<float>(mask.spacing[a]));
  store_at<float>(hdr, kOffVoxOffset, 352.0f);
  hdr[kOffMagic + 0] = 'n';
  hdr[kOffMagic + 1] = '+';
  hdr[kOffMagic + 2] = '1';
  hdr[kOffMagic + 3] = '\0';

  for (std::uint32_t dcheck : mask.dims)
    if (dcheck > 32767) fail("mask dims exceed NIfTI int16 range");

  std::size_t nvox = static_cast<std::size_t>(mask.dims[0]) * mask.dims[1] * mask.dims[2];
  std::vector<unsigned char> vol(nvox, 0);
  for (const Voxel& v : mask.voxels) {
    std::size_t idx = static_cast<std::size_t>(v.z) * mask.dims[1] * mask.dims[0] +
                      static_cast<std::size_t>(v.y) * mask.dims[0] + v.x;
    vol[idx] = 1;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write '%s'", path.c_str());
  out.write(hdr.data(), static_cast<std::streamsize>(hdr.size()));
  out.write(reinterpret_cast<const char*>(vol.data()), static_cast<std::streamsize>(vol.size()));
  if (!out) fail("write failed on '%s'", path.c_str());
}

MaskFormat detect_format(const std::string& path) {
  if (ends_with(path, ".nii")) return MaskFormat::Nifti;
  if (ends_with(path, ".voxtext") || ends_with(path, ".txt")) return MaskFormat::VoxText;
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open '%s'", path.c_str());
  char head[8] = {0};
  in.read(head, sizeof(head));
  if (std::strncmp(head, "VOXMASK", 7) == 0) return MaskFormat::VoxText;
  return MaskFormat::Nifti;
}

}  // namespace

VoxelMask load_mask(const std::string& path, MaskFormat format) {
  if (format == MaskFormat::Auto) format = detect_format(path);
  return format == MaskFormat::VoxText ? load_voxtext(path) : load_nifti(path);
}

void save_mask(const VoxelMask& mask, const std::string& path, MaskFormat format) {
  if (format == MaskFormat::Auto)
    format = ends_with(path, ".nii") ? MaskFormat::Nifti : MaskFormat::VoxText;
  VoxelMask copy = mask;
  validate_and_canonicalize(copy);
  if (format == MaskFormat::VoxText)
    save_voxtext(copy, path);
  else
    save_nifti(copy, path);
}

TriangleMesh load_mesh_off(const std::string& path, MeshLoadStats* stats) {
  std::ifstream in(path);
  if (!in) fail("cannot open '%s'", path.c_str());

  auto next_line = [&](std::string& line) -> bool {
    while (std::getline(in, line)) {
      std::size_t i = line.find_first_not_of(" \t\r");
      if (i == std::string::npos) continue;
      if (line[i] == '#') continue;
      return true;
    }
    return false;
  };

  std::string line;
  if (!next_line(line)) fail("'%s': empty OFF file", path.c_str());
  {
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word == "OFF") {
      if (!next_line(line)) fail("'%s': missing OFF counts line", path.c_str());
    }
  }
  long long nv = -1, nf = -1, ne = 0;
  {
    std::istringstream ss(line);
    ss >> nv >> nf >> ne;
    if (ss.fail() || nv < 0 || nf < 0)
      fail("'%s': bad OFF counts line '%s'", path.c_str(), line.c_str());
  }
  TriangleMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (long long i = 0; i < nv; ++i) {
    if (!next_line(line)) fail("'%s': expected %lld vertices, got %lld", path.c_str(), nv, i);
    std::istringstream ss(line);
    double x, y, z;
    ss >> x >> y >> z;
    if (ss.fail()) fail("'%s': bad vertex line '%s'", path.c_str(), line.c_str());
    mesh.vertices.push_back({x, y, z});
  }
  std::size_t dropped = 0;
  mesh.triangles.reserve(static_cast<std::size_t>(nf));
  for (long long i = 0; i < nf; ++i) {
    if (!next_line(line)) fail("'%s': expected %lld faces, got %lld", path.c_str(), nf, i);
    std::istringstream ss(line);
    long long k, a, b, c;
    ss >> k >> a >> b >> c;
    if (ss.fail() || k != 3)
      fail("'%s': only triangle faces are supported, got face line '%s'", path.c_str(),
           line.c_str());
    if (a < 0 || b < 0 || c < 0 || a >= nv || b >= nv || c >= nv)
      fail("'%s': face references vertex out of range: '%s'", path.c_str(), line.c_str());
    if (a == b || b == c || a == c) {
      ++dropped;
      continue;
    }
    const auto& pa = mesh.vertices[static_cast<std::size_t>(a)];
    const auto& pb = mesh.vertices[static_cast<std::size_t>(b)];
    const auto& pc = mesh.vertices[static_cast<std::size_t>(c)];
    double ux = pb[0] - pa[0], uy = pb[1] - pa[1], uz = pb[2] - pa[2];
    double vx = pc[0] - pa[0], vy = pc[1] - pa[1], vz = pc[2] - pa[2];
    double cx = uy * vz - uz * vy, cy = uz * vx - ux * vz, cz = ux * vy - uy * vx;
    if (cx == 0.0 && cy == 0.0 && cz == 0.0) {
      ++dropped;
      continue;
    }
    mesh.triangles.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                              static_cast<std::uint32_t>(c)});
  }
  if (stats) stats->degenerate_dropped = dropped;
  return mesh;
}

void save_mesh_off(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write '%s'", path.c_str());
  out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.triangles.size() << " 0\n";
  for (const auto& v : mesh.vertices)
    out << strfmt("%.17g %.17g %.17g\n", v[0], v[1], v[2]);
  for (const auto& t : mesh.triangles)
    out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  if (!out) fail("write failed on '%s'", path.c_str());
}

}  // namespace cg
