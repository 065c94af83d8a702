#pragma once

// Constructive reduction of an integral curve to a union of unit rhombi.
//
// Pipeline per component of length n >= 5:
//   planarize  -- pivot the highest vertex towards a plane through a farthest pair
//   pack       -- reorder edge vectors (bounded prefix sums) by adjacent swaps
//   split      -- peel pentagons off vertex 0 until a single pentagon remains,
//                 each pentagon becoming two rhombi and one unit triangle.
// Every step is recorded in a CobordismLedger that can be replayed and checked.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "domes/curve.hpp"
#include "domes/error.hpp"
#include "domes/geom.hpp"
#include "domes/steinitz.hpp"

namespace domes {

enum class Stage { Planarize, Pack, PentagonFix };

inline constexpr const char* to_string(Stage s) {
  switch (s) {
    case Stage::Planarize: return "planarize";
    case Stage::Pack: return "pack";
    case Stage::PentagonFix: return "pentagon_fix";
  }
  return "unknown";
}

/// Replacement of one vertex by another point at unit distance from both
/// neighbours, recorded together with the attached rhombus [prev old next new].
struct PivotMove {
  std::size_t component = 0;
  std::size_t vertex = 0;
  Point old_point = Point::Zero();
  Point new_point = Point::Zero();
  Rhombus rhombus{};
  bool degenerate = false;  // neighbours coincide: no rhombus cell, seams only
  Stage stage = Stage::Planarize;
};

using Segment = std::array<Point, 2>;

/// Two oriented unit segments covering the same set with opposite orientation.
struct SeamPair {
  Segment first;
  Segment second;

  bool coincides(const Tolerance& tol = {}) const {
    return dist(first[0], second[1]) <= tol.geom_eps && dist(first[1], second[0]) <= tol.geom_eps;
  }
};

inline SeamPair seam(const Point& a, const Point& b) { return SeamPair{{a, b}, {b, a}}; }

struct TriangleFace {
  std::array<Point, 3> v;

  bool is_unit(const Tolerance& tol = {}) const {
    for (int i = 0; i < 3; ++i)
      if (std::abs(dist(v[i], v[(i + 1) % 3]) - 1.0) > tol.geom_eps) return false;
    return true;
  }
};

/// One pentagon peeled off a component and closed by two rhombi and a triangle.
struct PentagonSplit {
  std::size_t component = 0;
  std::optional<Point> peel_point;  // inductive steps only: the in-plane point z
  std::array<Point, 5> pentagon{};  // as peeled, before corrective pivots
  std::size_t rotation = 0;         // split labels start at pentagon[rotation]
  std::vector<PivotMove> fixes;     // vertex indices refer to the rotated pentagon
  Point apex = Point::Zero();
  std::array<Rhombus, 2> rhombi{};
  TriangleFace face{};
};

struct StageCounts {
  std::size_t planarize = 0;
  std::size_t pack = 0;
  std::size_t splits = 0;
  std::size_t fixes = 0;
};

struct CobordismLedger {
  IntegralCurve initial;
  std::vector<PivotMove> moves;  // planarize and pack moves, in application order
  std::vector<PentagonSplit> splits;
  std::vector<TriangleFace> triangles;
  std::vector<SeamPair> seams;
  std::vector<Rhombus> final_rhombi;
  IntegralCurve final_curve;
  StageCounts counts;
};

inline std::size_t choose2(std::size_t n) { return n * (n - (n > 0 ? 1 : 0)) / 2; }

/// Rhombus allowance for one component of length n.
inline std::size_t rhombus_budget(std::size_t n) {
  if (n <= 3) return 0;
  if (n == 4) return 1;
  return n * n + 2 * n - 12;
}

inline std::size_t rhombus_budget(const IntegralCurve& c) {
  std::size_t total = 0;
  for (const auto& comp : c.components()) total += rhombus_budget(comp.size());
  return total;
}

namespace detail {

inline std::size_t prev_index(std::size_t i, std::size_t n) { return (i + n - 1) % n; }
inline std::size_t next_index(std::size_t i, std::size_t n) { return (i + 1) % n; }

/// Pivots vertex i of a cyclic vertex list in place. Returns nothing for a no-op.
inline std::optional<PivotMove> pivot_in_place(Component& comp, std::size_t comp_index, std::size_t i,
                                               const Point& p, Stage stage, const Tolerance& tol) {
  const std::size_t n = comp.size();
  const Point& u = comp[prev_index(i, n)];
  const Point& w = comp[next_index(i, n)];
  if (std::abs(dist(p, u) - 1.0) > tol.geom_eps || std::abs(dist(p, w) - 1.0) > tol.geom_eps)
    throw Error(ErrorKind::NotOnPivotCircle, "pivot target is not at unit distance from both neighbours of vertex " +
                                                 std::to_string(i));
  if (dist(p, comp[i]) <= tol.geom_eps) return std::nullopt;
  PivotMove m;
  m.component = comp_index;
  m.vertex = i;
  m.old_point = comp[i];
  m.new_point = p;
  m.rhombus = Rhombus{{u, comp[i], w, p}};
  m.degenerate = dist(u, w) <= tol.geom_eps;
  m.stage = stage;
  comp[i] = p;
  return m;
}

/// Plane containing the line (v, w) minimizing the sum of squared vertex heights.
inline Plane plane_through_line(const Component& comp, const Point& v, const Point& w) {
  const Vec3 d = (w - v).normalized();
  auto [a, b] = circle_basis(d);
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  for (const auto& x : comp) {
    const Eigen::Vector2d y((x - v).dot(a), (x - v).dot(b));
    m += y * y.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(m);
  const Eigen::Vector2d c = eig.eigenvectors().col(0);
  return Plane{v, (c.x() * a + c.y() * b).normalized()};
}

/// Point of the unit sphere around u nearest to h (the locus of a pivot whose neighbours coincide).
inline Point sphere_point_nearest_plane(const Point& u, const Plane& h) {
  const double s = signed_distance_to_plane(u, h);
  if (std::abs(s) >= 1.0) return u - (s > 0 ? 1.0 : -1.0) * h.normal;
  const Point foot = u - s * h.normal;
  return foot + std::sqrt(1.0 - s * s) * circle_basis(h.normal).first;
}

inline void planarize_path(Component& comp, std::size_t comp_index, const std::vector<std::size_t>& path,
                           const Plane& h, std::vector<PivotMove>& moves, std::size_t& count,
                           std::size_t budget, const Tolerance& tol) {
  const std::size_t n = comp.size();
  double last_max = std::numeric_limits<double>::infinity();
  std::size_t last_count = 0;
  for (;;) {
    // Interior vertices only: the endpoints lie on h.
    double hmax = 0.0;
    std::size_t at = 0, nmax = 0;
    for (std::size_t k = 1; k + 1 < path.size(); ++k) {
      const double hk = distance_to_plane(comp[path[k]], h);
      if (hk > hmax) {
        hmax = hk;
        at = k;
        nmax = 1;
      } else if (hk == hmax && hk > 0.0) {
        ++nmax;
      }
    }
    if (hmax <= tol.geom_eps) return;

    // Descent of (max height, multiplicity of the max).
    const bool descended = hmax < last_max || (hmax == last_max && nmax < last_count);
    if (!descended) throw std::logic_error("planarize: termination metric did not decrease");
    last_max = hmax;
    last_count = nmax;

    const std::size_t i = path[at];
    const Point& u = comp[prev_index(i, n)];
    const Point& w = comp[next_index(i, n)];
    const double span = dist(u, w);
    if (span >= 2.0 - tol.geom_eps)
      throw std::logic_error("planarize: highest vertex is the midpoint of a straight triple");

    const Point target = span <= tol.geom_eps ? sphere_point_nearest_plane(u, h)
                                              : point_on_circle_nearest_plane(unit_ball_intersection(u, w, tol), h, tol);
    const double before = distance_to_plane(comp[i], h);
    if (auto m = pivot_in_place(comp, comp_index, i, target, Stage::Planarize, tol)) {
      moves.push_back(*m);
      ++count;
      if (count > budget) throw Error(ErrorKind::BudgetExceeded, "planarize exceeded C(n,2) moves");
    }
    if (!(distance_to_plane(comp[i], h) < before))
      throw std::logic_error("planarize: pivot did not lower the highest vertex");
  }
}

}  // namespace detail

/// Replaces vertex i of component comp by p, attaching the rhombus [v_{i-1} v_i v_{i+1} p].
inline std::pair<IntegralCurve, std::optional<PivotMove>> apply_pivot(const IntegralCurve& c, std::size_t comp,
                                                                      std::size_t i, const Point& p,
                                                                      const Tolerance& tol = {}) {
  auto comps = c.components();
  auto m = detail::pivot_in_place(comps.at(comp), comp, i, p, Stage::Planarize, tol);
  return {IntegralCurve(std::move(comps), tol), m};
}

/// Moves one component into a plane through a farthest vertex pair.
inline std::vector<PivotMove> planarize_component(Component& comp, std::size_t comp_index, const Tolerance& tol = {}) {
  std::vector<PivotMove> moves;
  const std::size_t n = comp.size();
  const auto [i0, j0] = farthest_vertex_pair(comp);
  const Plane h = detail::plane_through_line(comp, comp[i0], comp[j0]);
  std::vector<std::size_t> first, second;
  for (std::size_t k = i0; k != j0; k = (k + 1) % n) first.push_back(k);
  first.push_back(j0);
  for (std::size_t k = j0; k != i0; k = (k + 1) % n) second.push_back(k);
  second.push_back(i0);
  std::size_t count = 0;
  const std::size_t budget = choose2(n);
  detail::planarize_path(comp, comp_index, first, h, moves, count, budget, tol);
  detail::planarize_path(comp, comp_index, second, h, moves, count, budget, tol);
  return moves;
}

inline std::pair<IntegralCurve, std::vector<PivotMove>> planarize(const IntegralCurve& c, const Tolerance& tol = {}) {
  auto comps = c.components();
  std::vector<PivotMove> moves;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    auto m = planarize_component(comps[k], k, tol);
    moves.insert(moves.end(), m.begin(), m.end());
  }
  return {IntegralCurve(std::move(comps), tol), std::move(moves)};
}

/// Reorders the edges of a planar component so that every vertex lies within
/// distance 2 of vertex 0. Each adjacent swap of edge vectors is one pivot
/// (the reflection of the middle vertex across the line through its neighbours).
inline std::vector<PivotMove> pack_component(Component& comp, std::size_t comp_index, const Tolerance& tol = {}) {
  const std::size_t n = comp.size();
  const auto plane = is_planar(comp, tol);
  if (!plane) throw Error(ErrorKind::InvalidCurve, "pack requires a planar component");
  auto [e1, e2] = circle_basis(plane->normal);
  std::vector<Vec2> edges;
  edges.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vec3 d = comp[(j + 1) % n] - comp[j];
    edges.push_back(Vec2(d.dot(e1), d.dot(e2)).normalized());
  }
  const Permutation order = steinitz_order(edges, tol);
  std::vector<std::size_t> rank(n);
  for (std::size_t k = 0; k < n; ++k) rank[order[k]] = k;

  std::vector<std::size_t> current(n);
  for (std::size_t j = 0; j < n; ++j) current[j] = j;
  std::vector<PivotMove> moves;
  for (bool swapped = true; swapped;) {
    swapped = false;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      if (rank[current[j]] <= rank[current[j + 1]]) continue;
      std::swap(current[j], current[j + 1]);
      swapped = true;
      const Point target = comp[j] + (comp[j + 2 == n ? 0 : j + 2] - comp[j + 1]);
      if (auto m = detail::pivot_in_place(comp, comp_index, j + 1, target, Stage::Pack, tol)) {
        moves.push_back(*m);
        if (moves.size() > choose2(n)) throw Error(ErrorKind::BudgetExceeded, "pack exceeded C(n,2) moves");
      }
    }
  }
  for (const auto& p : comp)
    if (dist(p, comp[0]) > kSteinitzBound + tol.geom_eps)
      throw std::logic_error("pack: postcondition violated, vertex beyond distance 2");
  return moves;
}

inline std::pair<IntegralCurve, std::vector<PivotMove>> pack(const IntegralCurve& c, const Tolerance& tol = {}) {
  auto comps = c.components();
  std::vector<PivotMove> moves;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    auto m = pack_component(comps[k], k, tol);
    moves.insert(moves.end(), m.begin(), m.end());
  }
  return {IntegralCurve(std::move(comps), tol), std::move(moves)};
}

namespace detail {

// Circumradius of [v1 v3 v4]; infinite when the triangle degenerates.
inline double split_radius(const std::array<Point, 5>& p, const Tolerance& tol) {
  try {
    return circumradius(p[0], p[2], p[3], tol);
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

inline std::optional<Point> reflected_candidate(const std::array<Point, 5>& p, std::size_t i, const Tolerance& tol) {
  const Point& u = p[(i + 4) % 5];
  const Point& w = p[(i + 1) % 5];
  if (dist(u, w) <= tol.geom_eps) return std::nullopt;
  return reflect_across_line(p[i], u, w, tol);
}

// Best point of the pivot circle of vertex i for the split radius, sampled at 360 angles.
inline std::optional<std::pair<double, Point>> best_circle_candidate(const std::array<Point, 5>& p, std::size_t i,
                                                                     const Tolerance& tol) {
  const Point& u = p[(i + 4) % 5];
  const Point& w = p[(i + 1) % 5];
  const double span = dist(u, w);
  if (span > 2.0 + tol.geom_eps) return std::nullopt;
  std::vector<Circle3> circles;
  if (span <= tol.geom_eps) {
    // Coincident neighbours: the whole unit sphere is available, sample three great circles.
    for (int a = 0; a < 3; ++a) circles.push_back(Circle3{u, 1.0, Vec3::Unit(a)});
  } else {
    circles.push_back(unit_ball_intersection(u, w, tol));
  }
  std::optional<std::pair<double, Point>> best;
  for (const auto& c : circles)
    for (int s = 0; s < 360; ++s) {
      auto q = p;
      q[i] = circle_point(c, 2.0 * std::numbers::pi * s / 360.0);
      if (dist(q[i], p[i]) <= tol.geom_eps) continue;
      const double r = split_radius(q, tol);
      if (!best || r < best->first) best = std::pair{r, q[i]};
    }
  return best;
}

}  // namespace detail

struct PentagonSplitResult {
  std::array<Rhombus, 2> rhombi{};
  TriangleFace face{};
  std::vector<PivotMove> fixes;
  std::array<Point, 5> fixed_pentagon{};
  Point apex = Point::Zero();
  std::size_t rotation = 0;
};

inline constexpr std::size_t kMaxPentagonFixes = 3;
// Circumradius below which the apex is accepted.
inline constexpr double kSplitRadiusLimit = 1.0 - 1e-6;

namespace detail {

inline PentagonSplitResult split_fixed_labels(std::array<Point, 5> p, std::size_t comp_index,
                                              const Tolerance& tol) {
  PentagonSplitResult out;
  auto apply = [&](std::size_t i, const Point& target) {
    Component comp(p.begin(), p.end());
    if (auto m = detail::pivot_in_place(comp, comp_index, i, target, Stage::PentagonFix, tol)) {
      out.fixes.push_back(*m);
      p[i] = target;
      return;
    }
    throw Error(ErrorKind::FixBudgetExceeded, "corrective pivot does not move the vertex");
  };

  while (detail::split_radius(p, tol) >= kSplitRadiusLimit) {
    if (out.fixes.size() >= kMaxPentagonFixes)
      throw Error(ErrorKind::FixBudgetExceeded, "circumradius still >= 1 after corrective pivots");
    bool done = false;
    for (std::size_t i : {std::size_t{2}, std::size_t{1}, std::size_t{3}}) {
      auto cand = detail::reflected_candidate(p, i, tol);
      if (!cand || dist(*cand, p[i]) <= tol.geom_eps) continue;
      auto q = p;
      q[i] = *cand;
      if (detail::split_radius(q, tol) < kSplitRadiusLimit) {
        apply(i, *cand);
        done = true;
        break;
      }
    }
    if (done) break;
    const double before = detail::split_radius(p, tol);
    auto best3 = detail::best_circle_candidate(p, 2, tol);
    std::size_t which = 2;
    std::optional<std::pair<double, Point>> best = best3;
    if (!best3 || best3->first >= kSplitRadiusLimit) {
      auto best4 = detail::best_circle_candidate(p, 3, tol);
      if (best4 && (!best || best4->first < best->first)) {
        best = best4;
        which = 3;
      }
    }
    if (!best || !(best->first < before))
      throw Error(ErrorKind::FixBudgetExceeded, "no corrective pivot reduces the circumradius");
    apply(which, best->second);
  }

  const auto z = apex_at_unit_distance(p[0], p[2], p[3], Side::Positive, tol);
  if (!z) throw std::logic_error("pentagon_split: apex missing although circumradius < 1");
  out.apex = *z;
  out.rhombi[0] = Rhombus{{p[0], p[1], p[2], *z}};
  out.rhombi[1] = Rhombus{{p[0], *z, p[3], p[4]}};
  out.face = TriangleFace{{p[2], p[3], *z}};
  out.fixed_pentagon = p;
  return out;
}

inline std::array<Point, 5> rotated(const std::array<Point, 5>& p, std::size_t r) {
  std::array<Point, 5> q;
  for (std::size_t i = 0; i < 5; ++i) q[i] = p[(i + r) % 5];
  return q;
}

}  // namespace detail

/// Closes a unit pentagon [v1..v5] with rhombi [v1 v2 v3 z], [v1 z v4 v5] and
/// the unit triangle [v3 v4 z], where z is at unit distance from v1, v3, v4.
/// The labels start at p[0] unless [v1 v3 v4] has circumradius >= 1 there, in
/// which case the rotation with the smallest circumradius is used. When no
/// rotation is below 1, up to three corrective pivots are applied first:
/// reflections of v3, v2, v4 across their neighbours' line, then the best of
/// 360 samples on the pivot circle of v3 (and of v4 when v3 alone cannot get
/// below 1). Rotations are tried in order until one admits such pivots.
inline PentagonSplitResult pentagon_split(const std::array<Point, 5>& p, std::size_t comp_index = 0,
                                          const Tolerance& tol = {}) {
  for (std::size_t i = 0; i < 5; ++i)
    if (std::abs(dist(p[i], p[(i + 1) % 5]) - 1.0) > tol.geom_eps)
      throw Error(ErrorKind::InvalidCurve, "pentagon edge is not unit");
  auto finish = [&](std::size_t r) {
    PentagonSplitResult out = detail::split_fixed_labels(detail::rotated(p, r), comp_index, tol);
    out.rotation = r;
    return out;
  };
  if (detail::split_radius(p, tol) < kSplitRadiusLimit) return finish(0);
  std::size_t best = 0;
  double best_radius = std::numeric_limits<double>::infinity();
  for (std::size_t r = 1; r < 5; ++r) {
    const double rad = detail::split_radius(detail::rotated(p, r), tol);
    if (rad < best_radius) {
      best_radius = rad;
      best = r;
    }
  }
  if (best_radius < kSplitRadiusLimit) return finish(best);
  std::optional<Error> first;
  for (std::size_t r = 0; r < 5; ++r) {
    try {
      return finish(r);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::FixBudgetExceeded) throw;
      if (!first) first = e;
    }
  }
  throw *first;
}

namespace detail {

/// In-plane point z at unit distance from v1 and v4, on the side away from
/// the centroid of v2, v3.
inline Point peel_point(const Component& c, const Plane& h, const Tolerance& tol) {
  const Point& v1 = c[0];
  const Point& v4 = c[3];
  const Point mid23 = 0.5 * (c[1] + c[2]);
  if (dist(v1, v4) <= tol.geom_eps) {
    Vec3 away = (v1 - mid23) - (v1 - mid23).dot(h.normal) * h.normal;
    if (away.norm() <= tol.geom_eps) away = circle_basis(h.normal).first;
    return v1 + away.normalized();
  }
  const Circle3 circle = unit_ball_intersection(v1, v4, tol);
  const Vec3 t = h.normal.cross(circle.axis).normalized();
  const Point za = circle.center + circle.radius * t;
  const Point zb = circle.center - circle.radius * t;
  return dist(zb, mid23) > dist(za, mid23) ? zb : za;
}

inline void record_split(CobordismLedger& ledger, std::size_t comp_index, const std::array<Point, 5>& pentagon,
                         std::optional<Point> peel, const Tolerance& tol) {
  PentagonSplitResult r = pentagon_split(pentagon, comp_index, tol);
  PentagonSplit s;
  s.component = comp_index;
  s.peel_point = peel;
  s.pentagon = pentagon;
  s.rotation = r.rotation;
  s.fixes = r.fixes;
  s.apex = r.apex;
  s.rhombi = r.rhombi;
  s.face = r.face;
  for (const auto& m : r.fixes) {
    if (m.degenerate) {
      ledger.seams.push_back(seam(m.rhombus.v[0], m.rhombus.v[1]));
      ledger.seams.push_back(seam(m.rhombus.v[0], m.rhombus.v[3]));
    } else {
      ledger.final_rhombi.push_back(m.rhombus);
    }
  }
  ledger.counts.fixes += r.fixes.size();
  ledger.final_rhombi.push_back(r.rhombi[0]);
  ledger.final_rhombi.push_back(r.rhombi[1]);
  ledger.triangles.push_back(r.face);
  const Point& z = r.apex;
  const auto& q = r.fixed_pentagon;
  ledger.seams.push_back(seam(z, q[0]));
  ledger.seams.push_back(seam(z, q[2]));
  ledger.seams.push_back(seam(z, q[3]));
  ledger.splits.push_back(std::move(s));
  ++ledger.counts.splits;
}

inline void absorb_moves(CobordismLedger& ledger, const std::vector<PivotMove>& moves) {
  for (const auto& m : moves) {
    ledger.moves.push_back(m);
    if (m.degenerate) {
      ledger.seams.push_back(seam(m.rhombus.v[0], m.rhombus.v[1]));
      ledger.seams.push_back(seam(m.rhombus.v[0], m.rhombus.v[3]));
    } else {
      ledger.final_rhombi.push_back(m.rhombus);
    }
  }
}

}  // namespace detail

/// Full constructive reduction. Components of length 3 become a triangle,
/// length 4 components are kept as final rhombi, longer ones are planarized,
/// packed and split into pentagons.
inline CobordismLedger reduce_to_rhombi(const IntegralCurve& curve, const Tolerance& tol = {}) {
  CobordismLedger ledger;
  ledger.initial = curve;
  for (std::size_t ci = 0; ci < curve.num_components(); ++ci) {
    Component comp = curve.component(ci);
    const std::size_t n = comp.size();
    if (n < 3) throw Error(ErrorKind::ComponentTooShort, "component shorter than 3");
    if (n == 3) {
      ledger.triangles.push_back(TriangleFace{{comp[0], comp[1], comp[2]}});
      continue;
    }
    if (n == 4) {
      ledger.final_rhombi.push_back(Rhombus{{comp[0], comp[1], comp[2], comp[3]}});
      continue;
    }
    const std::size_t rhombi_before = ledger.final_rhombi.size();

    auto planar_moves = planarize_component(comp, ci, tol);
    ledger.counts.planarize += planar_moves.size();
    detail::absorb_moves(ledger, planar_moves);
    auto pack_moves = pack_component(comp, ci, tol);
    ledger.counts.pack += pack_moves.size();
    detail::absorb_moves(ledger, pack_moves);

    const Plane h = best_fit_plane(comp);
    while (comp.size() > 5) {
      const Point z = detail::peel_point(comp, h, tol);
      const std::array<Point, 5> pentagon{comp[0], comp[1], comp[2], comp[3], z};
      ledger.seams.push_back(seam(comp[0], z));
      ledger.seams.push_back(seam(z, comp[3]));
      detail::record_split(ledger, ci, pentagon, z, tol);
      Component rest{comp[0], z};
      rest.insert(rest.end(), comp.begin() + 3, comp.end());
      comp = std::move(rest);
    }
    detail::record_split(ledger, ci, {comp[0], comp[1], comp[2], comp[3], comp[4]}, std::nullopt, tol);

    const std::size_t used = ledger.final_rhombi.size() - rhombi_before;
    if (used > rhombus_budget(n))
      throw Error(ErrorKind::BudgetExceeded, "component " + std::to_string(ci) + " used " + std::to_string(used) +
                                                 " rhombi, budget " + std::to_string(rhombus_budget(n)));
  }
  return ledger;
}

/// Re-executes the ledger's moves and splits from the initial curve, checking
/// every recorded point, and returns the unreduced remainder.
inline IntegralCurve replay_ledger(const CobordismLedger& ledger, const Tolerance& tol = {}) {
  auto comps = ledger.initial.components();
  auto check_move = [&](Component& comp, const PivotMove& m) {
    if (m.vertex >= comp.size()) throw Error(ErrorKind::ReplayMismatch, "move vertex out of range");
    if (dist(comp[m.vertex], m.old_point) > tol.geom_eps)
      throw Error(ErrorKind::ReplayMismatch, "move old point does not match the curve");
    const std::size_t n = comp.size();
    const Rhombus expect{{comp[(m.vertex + n - 1) % n], comp[m.vertex], comp[(m.vertex + 1) % n], m.new_point}};
    for (int k = 0; k < 4; ++k)
      if (dist(expect.v[k], m.rhombus.v[k]) > tol.geom_eps)
        throw Error(ErrorKind::ReplayMismatch, "move rhombus does not match the curve");
    try {
      detail::pivot_in_place(comp, m.component, m.vertex, m.new_point, m.stage, tol);
    } catch (const Error& e) {
      throw Error(ErrorKind::ReplayMismatch, e.what());
    }
  };
  for (const auto& m : ledger.moves) {
    if (m.component >= comps.size()) throw Error(ErrorKind::ReplayMismatch, "move component out of range");
    check_move(comps[m.component], m);
  }

  std::vector<bool> consumed(comps.size(), false);
  for (std::size_t ci = 0; ci < comps.size(); ++ci)
    if (comps[ci].size() <= 4) consumed[ci] = true;

  for (const auto& s : ledger.splits) {
    if (s.component >= comps.size() || consumed[s.component])
      throw Error(ErrorKind::ReplayMismatch, "split refers to a consumed component");
    Component& comp = comps[s.component];
    std::array<Point, 5> expect{};
    if (comp.size() > 5) {
      if (!s.peel_point) throw Error(ErrorKind::ReplayMismatch, "inductive split without peel point");
      const Point z = *s.peel_point;
      if (std::abs(dist(z, comp[0]) - 1.0) > tol.geom_eps || std::abs(dist(z, comp[3]) - 1.0) > tol.geom_eps)
        throw Error(ErrorKind::ReplayMismatch, "peel point not at unit distance");
      expect = {comp[0], comp[1], comp[2], comp[3], z};
      Component rest{comp[0], z};
      rest.insert(rest.end(), comp.begin() + 3, comp.end());
      comp = std::move(rest);
    } else if (comp.size() == 5) {
      expect = {comp[0], comp[1], comp[2], comp[3], comp[4]};
      consumed[s.component] = true;
    } else {
      throw Error(ErrorKind::ReplayMismatch, "split on a component shorter than 5");
    }
    for (int k = 0; k < 5; ++k)
      if (dist(expect[k], s.pentagon[k]) > tol.geom_eps)
        throw Error(ErrorKind::ReplayMismatch, "split pentagon does not match the curve");
    if (s.rotation >= 5) throw Error(ErrorKind::ReplayMismatch, "split rotation out of range");
    Component piece;
    for (std::size_t k = 0; k < 5; ++k) piece.push_back(expect[(k + s.rotation) % 5]);
    for (const auto& m : s.fixes) check_move(piece, m);
    const Point& z = s.apex;
    const Rhombus ra{{piece[0], piece[1], piece[2], z}};
    const Rhombus rb{{piece[0], z, piece[3], piece[4]}};
    for (int k = 0; k < 4; ++k)
      if (dist(ra.v[k], s.rhombi[0].v[k]) > tol.geom_eps || dist(rb.v[k], s.rhombi[1].v[k]) > tol.geom_eps)
        throw Error(ErrorKind::ReplayMismatch, "split rhombi do not match the pentagon");
    const std::array<Point, 3> face{piece[2], piece[3], z};
    for (int k = 0; k < 3; ++k)
      if (dist(face[k], s.face.v[k]) > tol.geom_eps)
        throw Error(ErrorKind::ReplayMismatch, "split triangle does not match the pentagon");
  }

  std::vector<Component> rest;
  for (std::size_t ci = 0; ci < comps.size(); ++ci)
    if (!consumed[ci]) rest.push_back(comps[ci]);
  return rest.empty() ? IntegralCurve{} : IntegralCurve(std::move(rest), tol);
}

}  // namespace domes
