#pragma once

// Tolerance-aware Euclidean primitives shared by the curve, cobordism and
// surface code. Everything here is a pure function on values.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <Eigen/Dense>

#include "domes/error.hpp"

namespace domes {

using Point = Eigen::Vector3d;
using Vec3 = Eigen::Vector3d;

/// Centralized numerical thresholds. Every predicate takes one explicitly.
struct Tolerance {
  double geom_eps = 1e-9;
  double rank_rel_eps = 1e-7;

  bool valid() const { return geom_eps > 0.0 && rank_rel_eps > 0.0; }
};

struct Plane {
  Point base = Point::Zero();
  Vec3 normal = Vec3::UnitZ();
};

/// Circle in 3-space; `axis` is the unit normal of the circle's plane.
struct Circle3 {
  Point center = Point::Zero();
  double radius = 0.0;
  Vec3 axis = Vec3::UnitZ();
};

enum class Side { Positive, Negative };

inline bool is_finite(const Point& p) { return p.allFinite(); }

inline double dist(const Point& a, const Point& b) { return (a - b).norm(); }

inline double signed_distance_to_plane(const Point& p, const Plane& h) {
  return (p - h.base).dot(h.normal);
}

inline double distance_to_plane(const Point& p, const Plane& h) {
  return std::abs(signed_distance_to_plane(p, h));
}

/// Orthonormal pair spanning the plane orthogonal to `axis`. The first vector
/// is axis x e_x, falling back to axis x e_y when axis is (nearly) parallel to e_x.
inline std::pair<Vec3, Vec3> circle_basis(const Vec3& axis) {
  Vec3 e1 = axis.cross(Vec3::UnitX());
  if (e1.norm() < 1e-6) e1 = axis.cross(Vec3::UnitY());
  e1.normalize();
  Vec3 e2 = axis.cross(e1).normalized();
  return {e1, e2};
}

inline Point circle_point(const Circle3& c, double theta) {
  auto [e1, e2] = circle_basis(c.axis);
  return c.center + c.radius * (std::cos(theta) * e1 + std::sin(theta) * e2);
}

/// Locus of points at distance exactly 1 from both `u` and `w`.
inline Circle3 unit_ball_intersection(const Point& u, const Point& w, const Tolerance& tol = {}) {
  const Vec3 d = w - u;
  const double len = d.norm();
  if (len <= tol.geom_eps) throw Error(ErrorKind::Coincident, "unit spheres share a center");
  if (len > 2.0 + tol.geom_eps) throw Error(ErrorKind::Separated, "unit spheres are disjoint");
  Circle3 c;
  c.center = 0.5 * (u + w);
  c.axis = d / len;
  c.radius = std::sqrt(std::max(0.0, 1.0 - 0.25 * len * len));
  return c;
}

namespace detail {

inline void require_triangle(const Point& a, const Point& b, const Point& c, const Tolerance& tol) {
  const double ab = dist(a, b), bc = dist(b, c), ca = dist(c, a);
  if (std::min({ab, bc, ca}) <= tol.geom_eps)
    throw Error(ErrorKind::Degenerate, "coincident triangle vertices");
  const double twice_area = (b - a).cross(c - a).norm();
  if (twice_area / std::max({ab, bc, ca}) <= tol.geom_eps)
    throw Error(ErrorKind::Degenerate, "collinear triangle vertices");
}

}  // namespace detail

inline double circumradius(const Point& a, const Point& b, const Point& c, const Tolerance& tol = {}) {
  detail::require_triangle(a, b, c, tol);
  const double area = 0.5 * (b - a).cross(c - a).norm();
  return dist(a, b) * dist(b, c) * dist(c, a) / (4.0 * area);
}

inline Point circumcenter(const Point& a, const Point& b, const Point& c, const Tolerance& tol = {}) {
  detail::require_triangle(a, b, c, tol);
  const Vec3 ab = b - a, ac = c - a;
  const Vec3 n = ab.cross(ac);
  return a + (ac.squaredNorm() * n.cross(ab) + ab.squaredNorm() * ac.cross(n)) / (2.0 * n.squaredNorm());
}

/// Point at distance 1 from a, b and c on the requested side of their plane,
/// or nothing when the circumradius is at least 1.
inline std::optional<Point> apex_at_unit_distance(const Point& a, const Point& b, const Point& c,
                                                  Side side = Side::Positive,
                                                  const Tolerance& tol = {}) {
  const double r = circumradius(a, b, c, tol);
  if (r >= 1.0) return std::nullopt;
  const Vec3 n = (b - a).cross(c - a).normalized();
  const double h = std::sqrt(1.0 - r * r);
  return circumcenter(a, b, c, tol) + (side == Side::Positive ? h : -h) * n;
}

inline Point reflect_across_line(const Point& p, const Point& a, const Point& b, const Tolerance& tol = {}) {
  const Vec3 d = b - a;
  const double len = d.norm();
  if (len <= tol.geom_eps) throw Error(ErrorKind::DegenerateLine, "line through coincident points");
  const Vec3 u = d / len;
  const Point proj = a + (p - a).dot(u) * u;
  return 2.0 * proj - p;
}

/// Point of `c` minimizing unsigned distance to `h`. When the circle meets the
/// plane, the crossing with the smaller parameter angle is returned; when the
/// circle is parallel to the plane, the parameter-0 point is returned.
inline Point point_on_circle_nearest_plane(const Circle3& c, const Plane& h, const Tolerance& tol = {}) {
  if (c.radius == 0.0) return c.center;
  auto [e1, e2] = circle_basis(c.axis);
  const double hm = signed_distance_to_plane(c.center, h);
  const double alpha = h.normal.dot(e1), beta = h.normal.dot(e2);
  const double amp = c.radius * std::hypot(alpha, beta);
  auto at = [&](double theta) {
    return c.center + c.radius * (std::cos(theta) * e1 + std::sin(theta) * e2);
  };
  if (amp <= tol.geom_eps * 1e-3) return at(0.0);
  const double phi = std::atan2(beta, alpha);
  if (std::abs(hm) <= amp) {
    const double s = std::acos(std::clamp(-hm / amp, -1.0, 1.0));
    auto wrap = [](double t) {
      t = std::fmod(t, 2.0 * std::numbers::pi);
      return t < 0.0 ? t + 2.0 * std::numbers::pi : t;
    };
    return at(std::min(wrap(phi + s), wrap(phi - s)));
  }
  return at(hm > 0.0 ? phi + std::numbers::pi : phi);
}

}  // namespace domes
