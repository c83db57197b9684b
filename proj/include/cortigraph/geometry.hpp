#pragma once

#include <array>
#include <cmath>

namespace cg {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 from_array(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

// Tolerance on the normalized segment parameter and barycentric
// coordinates: contacts within this distance of a boundary still count as
// intersections, so grazing touches remove edges rather than slipping
// through.
inline constexpr double kIntersectEps = 1e-9;

// Segment p0-p1 against triangle (a, b, c), boundary-inclusive on both
// primitives. Near-parallel and coplanar configurations are resolved
// conservatively: if the segment lies within tolerance of the triangle's
// plane and their bounding boxes overlap, it counts as a hit.
bool segment_intersects_triangle(const Vec3& p0, const Vec3& p1, const Vec3& a,
                                 const Vec3& b, const Vec3& c,
                                 double eps = kIntersectEps);

}  // namespace cg
