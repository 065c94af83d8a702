#pragma once

// Dome chains: the 2-cells implied by a cobordism ledger, the signed
// boundary arithmetic used to check them, and OFF export.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "domes/cobordism.hpp"
#include "domes/curve.hpp"
#include "domes/geom.hpp"

namespace domes {

/// Identifies points that agree within geom_eps. Points within eps of two
/// different representatives are counted as collisions rather than merged.
class VertexIndex {
 public:
  explicit VertexIndex(double eps) : eps_(eps) {}

  std::size_t id(const Point& p) {
    const Key k = key(p);
    std::size_t found = kNone;
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          auto it = cells_.find(Key{k[0] + dx, k[1] + dy, k[2] + dz});
          if (it == cells_.end()) continue;
          for (std::size_t rep : it->second) {
            if (dist(points_[rep], p) > eps_) continue;
            if (found != kNone && found != rep) ++collisions_;
            if (found == kNone) found = rep;
          }
        }
    if (found != kNone) return found;
    points_.push_back(p);
    cells_[k].push_back(points_.size() - 1);
    return points_.size() - 1;
  }

  const std::vector<Point>& points() const { return points_; }
  std::size_t collisions() const { return collisions_; }

 private:
  using Key = std::array<std::int64_t, 3>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = 1469598103934665603ull;
      for (auto v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
      return h;
    }
  };
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  Key key(const Point& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x() / eps_)), static_cast<std::int64_t>(std::floor(p.y() / eps_)),
            static_cast<std::int64_t>(std::floor(p.z() / eps_))};
  }

  double eps_;
  std::vector<Point> points_;
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> cells_;
  std::size_t collisions_ = 0;
};

/// Integer 1-chain over segments between identified vertices.
class SegmentChain {
 public:
  explicit SegmentChain(double eps) : index_(eps) {}

  void add_segment(const Point& a, const Point& b, long sign) {
    const std::size_t i = index_.id(a), j = index_.id(b);
    if (i == j) return;
    if (i < j)
      mult_[{i, j}] += sign;
    else
      mult_[{j, i}] -= sign;
  }

  template <typename Range>
  void add_cycle(const Range& pts, long sign) {
    const std::size_t n = std::size(pts);
    for (std::size_t k = 0; k < n; ++k) add_segment(pts[k], pts[(k + 1) % n], sign);
  }

  /// Segments with nonzero signed multiplicity.
  std::vector<std::pair<std::array<Point, 2>, long>> residual() const {
    std::vector<std::pair<std::array<Point, 2>, long>> out;
    for (const auto& [key, m] : mult_)
      if (m != 0) out.push_back({{index_.points()[key.first], index_.points()[key.second]}, m});
    return out;
  }

  bool is_zero() const { return residual().empty(); }
  std::size_t collisions() const { return index_.collisions(); }

 private:
  VertexIndex index_;
  std::map<std::pair<std::size_t, std::size_t>, long> mult_;
};

enum class CellOrigin { Pivot, PentagonFix, PentagonSplit };

struct RhombusCell {
  Rhombus rhombus;
  CellOrigin origin;
};

/// 2-chain realizing a cobordism: unit triangles, rhombus cells for the
/// boundary rhombi attached by moves and splits, and seam pairs recording
/// which edges cancel.
struct DomeChain {
  std::vector<TriangleFace> triangles;
  std::vector<RhombusCell> rhombi;
  std::vector<SeamPair> seams;
};

namespace detail {

inline void add_move_cells(DomeChain& chain, const PivotMove& m, CellOrigin origin) {
  const auto& r = m.rhombus.v;
  if (m.degenerate) {
    chain.seams.push_back(seam(r[0], r[1]));
    chain.seams.push_back(seam(r[0], r[3]));
    return;
  }
  chain.rhombi.push_back({m.rhombus, origin});
  for (int k = 0; k < 4; ++k) chain.seams.push_back(seam(r[k], r[(k + 1) % 4]));
}

}  // namespace detail

inline DomeChain assemble_from_ledger(const CobordismLedger& l, const Tolerance& tol = {}) {
  const IntegralCurve rest = replay_ledger(l, tol);
  if (!(rest == l.final_curve)) throw Error(ErrorKind::ReplayMismatch, "replayed remainder differs from final curve");
  DomeChain chain;
  for (const auto& comp : l.initial.components())
    if (comp.size() == 3) chain.triangles.push_back(TriangleFace{{comp[0], comp[1], comp[2]}});
  for (const auto& m : l.moves) detail::add_move_cells(chain, m, CellOrigin::Pivot);
  for (const auto& s : l.splits) {
    if (s.peel_point) {
      chain.seams.push_back(seam(s.pentagon[0], *s.peel_point));
      chain.seams.push_back(seam(*s.peel_point, s.pentagon[3]));
    }
    for (const auto& m : s.fixes) detail::add_move_cells(chain, m, CellOrigin::PentagonFix);
    chain.rhombi.push_back({s.rhombi[0], CellOrigin::PentagonSplit});
    chain.rhombi.push_back({s.rhombi[1], CellOrigin::PentagonSplit});
    chain.triangles.push_back(s.face);
    chain.seams.push_back(seam(s.apex, s.rhombi[0].v[0]));
    chain.seams.push_back(seam(s.apex, s.face.v[0]));
    chain.seams.push_back(seam(s.apex, s.face.v[1]));
  }
  return chain;
}

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool ok() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

namespace detail {

template <std::size_t N>
bool same_cell(const std::array<Point, N>& a, const std::array<Point, N>& b, double eps) {
  for (std::size_t k = 0; k < N; ++k)
    if (dist(a[k], b[k]) > eps) return false;
  return true;
}

// Multiset inclusion of `part` in `whole`; returns the unmatched entries of `whole`.
template <std::size_t N>
bool match_cells(const std::vector<std::array<Point, N>>& part, const std::vector<std::array<Point, N>>& whole,
                 double eps, std::vector<std::array<Point, N>>& leftover) {
  std::vector<bool> used(whole.size(), false);
  for (const auto& c : part) {
    bool hit = false;
    for (std::size_t i = 0; i < whole.size() && !hit; ++i)
      if (!used[i] && same_cell(c, whole[i], eps)) used[i] = hit = true;
    if (!hit) return false;
  }
  leftover.clear();
  for (std::size_t i = 0; i < whole.size(); ++i)
    if (!used[i]) leftover.push_back(whole[i]);
  return true;
}

}  // namespace detail

/// Checks a ledger: (a) unit cells, (b) the boundary identity
/// sum(d triangles) + sum(d rhombi) - gamma = 0 over identified unit segments,
/// (c) the rhombus budget, plus replay soundness, seam coincidence and
/// agreement between the ledger and the assembled chain.
inline ValidationReport validate_ledger(const CobordismLedger& l, const Tolerance& tol = {}) {
  ValidationReport report;

  {
    CheckResult c{"unit_cells", true, ""};
    for (std::size_t i = 0; i < l.triangles.size(); ++i)
      if (!l.triangles[i].is_unit(tol)) {
        c.passed = false;
        c.detail += "triangle " + std::to_string(i) + " not unit equilateral; ";
      }
    for (std::size_t i = 0; i < l.final_rhombi.size(); ++i)
      if (!l.final_rhombi[i].is_unit(tol)) {
        c.passed = false;
        c.detail += "rhombus " + std::to_string(i) + " not unit-sided; ";
      }
    report.checks.push_back(c);
  }

  {
    SegmentChain chain(tol.geom_eps);
    for (const auto& t : l.triangles) chain.add_cycle(t.v, +1);
    for (const auto& r : l.final_rhombi) chain.add_cycle(r.v, +1);
    for (const auto& comp : l.initial.components()) chain.add_cycle(comp, -1);
    const auto res = chain.residual();
    CheckResult c{"chain_identity", res.empty() && chain.collisions() == 0, ""};
    c.detail = std::to_string(res.size()) + " segments with nonzero multiplicity, " +
               std::to_string(chain.collisions()) + " vertex collisions";
    report.checks.push_back(c);
  }

  {
    const std::size_t budget = rhombus_budget(l.initial);
    CheckResult c{"rhombus_budget", l.final_rhombi.size() <= budget,
                  "k = " + std::to_string(l.final_rhombi.size()) + ", budget = " + std::to_string(budget)};
    report.checks.push_back(c);
  }

  DomeChain dome;
  {
    CheckResult c{"replay", true, ""};
    try {
      dome = assemble_from_ledger(l, tol);
    } catch (const Error& e) {
      c.passed = false;
      c.detail = e.what();
    }
    report.checks.push_back(c);
  }

  {
    CheckResult c{"seams", true, ""};
    std::size_t bad = 0;
    for (const auto& s : l.seams) bad += !s.coincides(tol);
    for (const auto& s : dome.seams) bad += !s.coincides(tol);
    c.passed = bad == 0;
    c.detail = std::to_string(bad) + " non-coincident seam pairs";
    report.checks.push_back(c);
  }

  {
    CheckResult c{"chain_matches_ledger", true, ""};
    std::vector<std::array<Point, 3>> dome_tris, ledger_tris, left3;
    for (const auto& t : dome.triangles) dome_tris.push_back(t.v);
    for (const auto& t : l.triangles) ledger_tris.push_back(t.v);
    std::vector<std::array<Point, 4>> dome_rh, ledger_rh, left4;
    for (const auto& r : dome.rhombi) dome_rh.push_back(r.rhombus.v);
    for (const auto& r : l.final_rhombi) ledger_rh.push_back(r.v);
    if (report.checks[3].passed) {
      if (!detail::match_cells(dome_tris, ledger_tris, tol.geom_eps, left3) || !left3.empty()) {
        c.passed = false;
        c.detail += "triangle cells differ; ";
      }
      // Rhombi without a cell are exactly the length-4 input components.
      std::vector<std::array<Point, 4>> direct;
      for (const auto& comp : l.initial.components())
        if (comp.size() == 4) direct.push_back({comp[0], comp[1], comp[2], comp[3]});
      std::vector<std::array<Point, 4>> left_direct;
      if (!detail::match_cells(dome_rh, ledger_rh, tol.geom_eps, left4) ||
          !detail::match_cells(left4, direct, tol.geom_eps, left_direct) || !left_direct.empty() ||
          left4.size() != direct.size()) {
        c.passed = false;
        c.detail += "rhombus cells differ; ";
      }
    } else {
      c.passed = false;
      c.detail = "skipped: replay failed";
    }
    report.checks.push_back(c);
  }
  return report;
}

struct HexagonJoin {
  IntegralCurve hexagon;
  std::array<TriangleFace, 2> faces;
};

/// Joins rhombi [v1 v2 v3 v4] and [v1' v2' v3' v4'] positioned with v1 = v1'
/// and |v2 v2'| = |v4 v4'| = 1 into the hexagon [v4 v3 v2 v2' v3' v4'] by
/// the unit triangles [v1 v2 v2'] and [v1 v4' v4].
inline HexagonJoin hexagon_join(const Rhombus& a, const Rhombus& b, const Tolerance& tol = {}) {
  const auto& p = a.v;
  const auto& q = b.v;
  if (dist(p[0], q[0]) > tol.geom_eps) throw Error(ErrorKind::PositioningViolated, "rhombi do not share v1");
  if (std::abs(dist(p[1], q[1]) - 1.0) > tol.geom_eps)
    throw Error(ErrorKind::PositioningViolated, "|v2 v2'| is not 1");
  if (std::abs(dist(p[3], q[3]) - 1.0) > tol.geom_eps)
    throw Error(ErrorKind::PositioningViolated, "|v4 v4'| is not 1");
  HexagonJoin out{IntegralCurve({{p[3], p[2], p[1], q[1], q[2], q[3]}}, tol),
                  {TriangleFace{{p[0], p[1], q[1]}}, TriangleFace{{p[0], q[3], p[3]}}}};
  return out;
}

/// Signed boundary of the join: d(faces) - hexagon - a + b, zero when consistent.
inline SegmentChain hexagon_join_residual(const HexagonJoin& j, const Rhombus& a, const Rhombus& b,
                                          const Tolerance& tol = {}) {
  SegmentChain chain(tol.geom_eps);
  for (const auto& f : j.faces) chain.add_cycle(f.v, +1);
  chain.add_cycle(j.hexagon.component(0), -1);
  chain.add_cycle(a.v, -1);
  chain.add_cycle(b.v, +1);
  return chain;
}

/// OFF export of the triangle and rhombus cells. Rhombi are split along the
/// v0-v2 diagonal; those faces are for viewing only.
inline void write_off(std::ostream& os, const DomeChain& chain, const Tolerance& tol = {}) {
  VertexIndex index(tol.geom_eps);
  std::vector<std::array<std::size_t, 3>> faces;
  for (const auto& t : chain.triangles) faces.push_back({index.id(t.v[0]), index.id(t.v[1]), index.id(t.v[2])});
  for (const auto& r : chain.rhombi) {
    const auto& v = r.rhombus.v;
    faces.push_back({index.id(v[0]), index.id(v[1]), index.id(v[2])});
    faces.push_back({index.id(v[0]), index.id(v[2]), index.id(v[3])});
  }
  os << "OFF\n";
  os << "# " << chain.triangles.size() << " unit triangles, " << chain.rhombi.size()
     << " rhombi triangulated along a diagonal (visualization only)\n";
  os << index.points().size() << " " << faces.size() << " 0\n";
  std::ostringstream buf;
  buf.precision(17);
  for (const auto& p : index.points()) buf << p.x() << " " << p.y() << " " << p.z() << "\n";
  for (const auto& f : faces) buf << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
  os << buf.str();
}

}  // namespace domes
