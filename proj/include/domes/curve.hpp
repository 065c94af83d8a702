#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "domes/error.hpp"
#include "domes/geom.hpp"

namespace domes {

using Component = std::vector<Point>;

/// Closed curve whose consecutive vertices (cyclically) are at unit distance.
/// May have several components; each has at least three vertices.
class IntegralCurve {
 public:
  IntegralCurve() = default;

  explicit IntegralCurve(std::vector<Component> components, const Tolerance& tol = {})
      : components_(std::move(components)) {
    for (std::size_t c = 0; c < components_.size(); ++c) {
      const auto& comp = components_[c];
      if (comp.size() < 3)
        throw Error(ErrorKind::ComponentTooShort,
                    "component " + std::to_string(c) + " has " + std::to_string(comp.size()) + " vertices");
      for (std::size_t i = 0; i < comp.size(); ++i) {
        if (!is_finite(comp[i])) throw Error(ErrorKind::InvalidCurve, "non-finite coordinate");
        const double len = dist(comp[i], comp[(i + 1) % comp.size()]);
        if (std::abs(len - 1.0) > tol.geom_eps)
          throw Error(ErrorKind::InvalidCurve, "edge " + std::to_string(i) + " of component " +
                                                   std::to_string(c) + " has length " + std::to_string(len));
      }
    }
  }

  const std::vector<Component>& components() const { return components_; }
  const Component& component(std::size_t i) const { return components_.at(i); }
  std::size_t num_components() const { return components_.size(); }
  bool empty() const { return components_.empty(); }

  /// |gamma|: total number of unit edges.
  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& c : components_) n += c.size();
    return n;
  }

  /// Replaces one vertex without re-validating; callers guarantee the unit-edge invariant.
  void set_vertex(std::size_t comp, std::size_t i, const Point& p) { components_.at(comp).at(i) = p; }

  friend bool operator==(const IntegralCurve& a, const IntegralCurve& b) {
    if (a.components_.size() != b.components_.size()) return false;
    for (std::size_t c = 0; c < a.components_.size(); ++c) {
      if (a.components_[c].size() != b.components_[c].size()) return false;
      for (std::size_t i = 0; i < a.components_[c].size(); ++i)
        if (a.components_[c][i] != b.components_[c][i]) return false;
    }
    return true;
  }

 private:
  std::vector<Component> components_;
};

/// Closed 4-edge unit curve [a b c d]. Need not be planar.
struct Rhombus {
  std::array<Point, 4> v;

  bool is_unit(const Tolerance& tol = {}) const {
    for (int i = 0; i < 4; ++i)
      if (std::abs(dist(v[i], v[(i + 1) % 4]) - 1.0) > tol.geom_eps) return false;
    return true;
  }
};

using HeightSequence = std::vector<double>;

/// Normalizes integer-length edges to unit steps by inserting collinear vertices.
inline IntegralCurve from_integer_curve(const std::vector<Component>& raw, const Tolerance& tol = {}) {
  std::vector<Component> out;
  out.reserve(raw.size());
  for (std::size_t c = 0; c < raw.size(); ++c) {
    const auto& comp = raw[c];
    Component unit;
    for (std::size_t i = 0; i < comp.size(); ++i) {
      const Point& a = comp[i];
      const Point& b = comp[(i + 1) % comp.size()];
      const double len = dist(a, b);
      const double rounded = std::round(len);
      if (!std::isfinite(len) || rounded < 1.0 || std::abs(len - rounded) > tol.geom_eps)
        throw Error(ErrorKind::NonIntegerEdge, "component " + std::to_string(c) + " edge " + std::to_string(i) +
                                                   " has length " + std::to_string(len));
      const int steps = static_cast<int>(rounded);
      for (int s = 0; s < steps; ++s) unit.push_back(a + (b - a) * (static_cast<double>(s) / steps));
    }
    out.push_back(std::move(unit));
  }
  return IntegralCurve(std::move(out), tol);
}

/// Indices of a maximally distant vertex pair; the first pair in lexicographic order wins ties.
inline std::pair<std::size_t, std::size_t> farthest_vertex_pair(const Component& c) {
  std::pair<std::size_t, std::size_t> best{0, 1};
  double best_d = -1.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double d = (c[i] - c[j]).squaredNorm();
      if (d > best_d) {
        best_d = d;
        best = {i, j};
      }
    }
  return best;
}

/// Least-squares plane through a point set (smallest-eigenvalue direction of the scatter matrix).
inline Plane best_fit_plane(const std::vector<Point>& pts) {
  Point centroid = Point::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) scatter += (p - centroid) * (p - centroid).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(scatter);
  return Plane{centroid, eig.eigenvectors().col(0).normalized()};
}

inline double max_plane_deviation(const std::vector<Point>& pts, const Plane& h) {
  double worst = 0.0;
  for (const auto& p : pts) worst = std::max(worst, distance_to_plane(p, h));
  return worst;
}

inline std::optional<Plane> is_planar(const Component& c, const Tolerance& tol = {}) {
  const Plane h = best_fit_plane(c);
  if (max_plane_deviation(c, h) <= tol.geom_eps) return h;
  return std::nullopt;
}

/// All components together in one plane.
inline std::optional<Plane> is_planar(const IntegralCurve& curve, const Tolerance& tol = {}) {
  std::vector<Point> all;
  for (const auto& c : curve.components()) all.insert(all.end(), c.begin(), c.end());
  if (all.empty()) return std::nullopt;
  return is_planar(all, tol);
}

/// Strict: every vertex lies at distance < eps from the center vertex.
inline bool is_packing(const Component& c, std::size_t center, double eps) {
  for (const auto& p : c)
    if (!(dist(p, c.at(center)) < eps)) return false;
  return true;
}

inline HeightSequence height_profile(const std::vector<Point>& path, const Plane& h) {
  HeightSequence out;
  out.reserve(path.size());
  for (const auto& p : path) out.push_back(distance_to_plane(p, h));
  return out;
}

}  // namespace domes
