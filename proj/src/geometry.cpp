#include "cortigraph/geometry.hpp"

#include <algorithm>

namespace cg {

namespace {

bool aabb_overlap(const Vec3& lo1, const Vec3& hi1, const Vec3& lo2, const Vec3& hi2,
                  double pad) {
  return lo1.x <= hi2.x + pad && lo2.x <= hi1.x + pad && lo1.y <= hi2.y + pad &&
         lo2.y <= hi1.y + pad && lo1.z <= hi2.z + pad && lo2.z <= hi1.z + pad;
}

}  // namespace

bool segment_intersects_triangle(const Vec3& p0, const Vec3& p1, const Vec3& a,
                                 const Vec3& b, const Vec3& c, double eps) {
  Vec3 dir = p1 - p0;
  Vec3 e1 = b - a;
  Vec3 e2 = c - a;
  Vec3 pvec = cross(dir, e2);
  double det = dot(e1, pvec);

  // Scale-aware parallelism threshold: det is a triple product, so compare
  // against the product of the factor magnitudes.
  double scale = norm(dir) * norm(e1) * norm(e2);
  if (std::abs(det) <= 1e-12 * scale) {
    Vec3 n = cross(e1, e2);
    double nn = norm(n);
    if (nn == 0.0) return false;  // degenerate triangle, nothing to hit
    double d0 = dot(n, p0 - a) / nn;
    double d1 = dot(n, p1 - a) / nn;
    double extent = std::max({norm(e1), norm(e2), norm(dir), 1.0});
    double world_eps = eps * extent;
    if (std::min(std::abs(d0), std::abs(d1)) > world_eps) return false;
    Vec3 tlo{std::min({a.x, b.x, c.x}), std::min({a.y, b.y, c.y}), std::min({a.z, b.z, c.z})};
    Vec3 thi{std::max({a.x, b.x, c.x}), std::max({a.y, b.y, c.y}), std::max({a.z, b.z, c.z})};
    Vec3 slo{std::min(p0.x, p1.x), std::min(p0.y, p1.y), std::min(p0.z, p1.z)};
    Vec3 shi{std::max(p0.x, p1.x), std::max(p0.y, p1.y), std::max(p0.z, p1.z)};
    return aabb_overlap(tlo, thi, slo, shi, world_eps);
  }

  double inv_det = 1.0 / det;
  Vec3 tvec = p0 - a;
  double u = dot(tvec, pvec) * inv_det;
  if (u < -eps || u > 1.0 + eps) return false;
  Vec3 qvec = cross(tvec, e1);
  double v = dot(dir, qvec) * inv_det;
  if (v < -eps || u + v > 1.0 + eps) return false;
  double t = dot(e2, qvec) * inv_det;
  return t >= -eps && t <= 1.0 + eps;
}

}  // namespace cg
