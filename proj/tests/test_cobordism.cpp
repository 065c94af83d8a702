#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "domes/census.hpp"
#include "domes/cobordism.hpp"
#include "domes/dome.hpp"

using namespace domes;

namespace {

Component regular_polygon(int k) {
  const double r = 1.0 / (2.0 * std::sin(std::numbers::pi / k));
  Component c;
  for (int i = 0; i < k; ++i) {
    const double t = 2.0 * std::numbers::pi * i / k;
    c.emplace_back(r * std::cos(t), r * std::sin(t), 0.0);
  }
  return c;
}

Component unit_square() { return {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}; }

Component folded_square() {
  Component c = unit_square();
  c[1] = Eigen::AngleAxisd(std::numbers::pi / 2.0, Vec3(1, 1, 0).normalized()) * c[1];
  return c;
}

std::array<Point, 5> as_pentagon(const Component& c) { return {c[0], c[1], c[2], c[3], c[4]}; }

// Random closed planar curve in the z = 0 plane (n-2 random steps, closed by two).
IntegralCurve random_planar_curve(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (;;) {
    Component c{Point::Zero()};
    for (std::size_t i = 0; i + 2 < n; ++i) {
      const double t = angle(rng);
      c.push_back(c.back() + Point(std::cos(t), std::sin(t), 0.0));
    }
    const Point s = c.back();
    const double d = s.norm();
    if (d <= 1e-6 || d >= 2.0) continue;
    const Point perp = Point(-s.y(), s.x(), 0.0) / d * std::sqrt(1.0 - 0.25 * d * d);
    c.push_back(0.5 * s + perp);
    return IntegralCurve({c});
  }
}

void expect_ledger_sound(const CobordismLedger& l) {
  for (const auto& r : l.final_rhombi) EXPECT_TRUE(r.is_unit(Tolerance{1e-9, 1e-7}));
  for (const auto& t : l.triangles) EXPECT_TRUE(t.is_unit(Tolerance{1e-9, 1e-7}));
  for (const auto& s : l.seams) EXPECT_TRUE(s.coincides());
  EXPECT_NO_THROW({
    const auto rest = replay_ledger(l);
    EXPECT_EQ(rest, l.final_curve);
  });
  EXPECT_LE(l.final_rhombi.size(), rhombus_budget(l.initial));
}

}  // namespace

TEST(ApplyPivot, SquareFoldsOntoItsDiagonal) {
  const IntegralCurve sq({unit_square()});
  const Point target = reflect_across_line(unit_square()[1], unit_square()[0], unit_square()[2]);
  EXPECT_NEAR(dist(target, Point(0, 1, 0)), 0.0, 1e-15);
  const auto [curve, move] = apply_pivot(sq, 0, 1, target);
  ASSERT_TRUE(move.has_value());
  EXPECT_EQ(curve.component(0)[1], target);
  EXPECT_EQ(curve.component(0)[3], Point(0, 1, 0));
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(dist(move->rhombus.v[k], unit_square()[k]), 0.0, 1e-15);
  EXPECT_FALSE(move->degenerate);
}

TEST(ApplyPivot, IdentityIsNoOp) {
  const IntegralCurve sq({unit_square()});
  const auto [curve, move] = apply_pivot(sq, 0, 2, unit_square()[2]);
  EXPECT_FALSE(move.has_value());
  EXPECT_EQ(curve, sq);
}

TEST(ApplyPivot, RejectsPointOffTheCircle) {
  const IntegralCurve sq({unit_square()});
  try {
    apply_pivot(sq, 0, 1, Point(1.5, -1.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotOnPivotCircle);
  }
}

TEST(ApplyPivot, DegenerateWhenNeighboursCoincide) {
  // Backtracking path: 0 -> e_x -> 0 -> ... ; vertex 1 has coincident neighbours.
  const IntegralCurve c({{{0, 0, 0}, {1, 0, 0}, {0, 0, 0}, {0, 1, 0}, {0, 1, 1}, {0, 0, 1}}});
  const auto [curve, move] = apply_pivot(c, 0, 1, Point(0, 0, -1));
  ASSERT_TRUE(move.has_value());
  EXPECT_TRUE(move->degenerate);
}

TEST(Planarize, AlreadyPlanarIsIdentity) {
  const IntegralCurve c({regular_polygon(7)});
  const auto [out, moves] = planarize(c);
  EXPECT_TRUE(moves.empty());
  EXPECT_EQ(out, c);
}

TEST(Planarize, FoldedRhombus) {
  const IntegralCurve c({folded_square()});
  ASSERT_FALSE(is_planar(c).has_value());
  const auto [out, moves] = planarize(c);
  EXPECT_TRUE(is_planar(out.component(0), Tolerance{1e-9, 1e-7}).has_value());
  EXPECT_LE(moves.size(), choose2(4));
  EXPECT_GE(moves.size(), 1u);
}

TEST(Planarize, RandomCurves) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_closed_curve(12, rng);
    const auto [out, moves] = planarize(c);
    EXPECT_TRUE(is_planar(out).has_value());
    EXPECT_LE(moves.size(), 66u);
    // Replaying the moves reproduces the output.
    auto comps = c.components();
    for (const auto& m : moves) {
      EXPECT_EQ(comps[0][m.vertex], m.old_point);
      comps[0][m.vertex] = m.new_point;
      EXPECT_TRUE(m.rhombus.is_unit());
    }
    EXPECT_EQ(IntegralCurve(comps), out);
  }
}

TEST(Planarize, EndpointsOfFarthestPairStayPut) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = random_closed_curve(9, rng);
    const auto [i, j] = farthest_vertex_pair(c.component(0));
    const auto [out, moves] = planarize(c);
    for (const auto& m : moves) {
      EXPECT_NE(m.vertex, i);
      EXPECT_NE(m.vertex, j);
    }
  }
}

TEST(Pack, AlreadyPackedNeedsNoMoves) {
  const IntegralCurve c({regular_polygon(5)});
  const auto [out, moves] = pack(c);
  EXPECT_TRUE(moves.empty());
}

TEST(Pack, HexagonStaysWithinTwo) {
  const IntegralCurve c({regular_polygon(6)});
  const auto [out, moves] = pack(c);
  for (const auto& p : out.component(0)) EXPECT_LE(dist(p, out.component(0)[0]), 2.0 + 1e-9);
}

TEST(Pack, RandomPlanarCurves) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 5 + trial % 25;
    const auto c = random_planar_curve(n, rng);
    const auto [out, moves] = pack(c);
    EXPECT_LE(moves.size(), choose2(n));
    for (const auto& p : out.component(0)) EXPECT_LE(dist(p, out.component(0)[0]), 2.0 + 1e-9);
    EXPECT_TRUE(is_planar(out).has_value());
    for (const auto& m : moves) {
      if (m.degenerate) continue;
      // Each swap is the reflection across the neighbours' line.
      const Point r = reflect_across_line(m.old_point, m.rhombus.v[0], m.rhombus.v[2]);
      EXPECT_NEAR(dist(r, m.new_point), 0.0, 1e-9);
    }
  }
}

TEST(PentagonSplit, RegularPentagon) {
  const auto r = pentagon_split(as_pentagon(regular_polygon(5)));
  EXPECT_TRUE(r.fixes.empty());
  EXPECT_NEAR(std::abs(r.apex.z()), 0.52573111211913, 1e-9);
  EXPECT_TRUE(r.rhombi[0].is_unit());
  EXPECT_TRUE(r.rhombi[1].is_unit());
  EXPECT_TRUE(r.face.is_unit());
}

TEST(PentagonSplit, CollinearTriangleNeedsFixes) {
  const std::array<Point, 5> p{Point(0, 0, 0), Point(0.5, std::sqrt(3.0) / 2.0, 0), Point(1, 0, 0), Point(2, 0, 0),
                               Point(1, 0, 0)};
  ASSERT_THROW(circumradius(p[0], p[2], p[3]), Error);
  const auto r = pentagon_split(p);
  EXPECT_GE(r.fixes.size(), 1u);
  EXPECT_LE(r.fixes.size(), 3u);
  EXPECT_LT(circumradius(r.fixed_pentagon[0], r.fixed_pentagon[2], r.fixed_pentagon[3]), 1.0);
  EXPECT_TRUE(r.rhombi[0].is_unit());
  EXPECT_TRUE(r.rhombi[1].is_unit());
  EXPECT_TRUE(r.face.is_unit());
  for (const auto& m : r.fixes) EXPECT_TRUE(m.rhombus.is_unit());
}

TEST(PentagonSplit, CoincidentCenterAndFourthVertex) {
  const std::array<Point, 5> p{Point(0, 0, 0), Point(-0.5, std::sqrt(3.0) / 2.0, 0), Point(-1, 0, 0), Point(0, 0, 0),
                               Point(0, -1, 0)};
  const auto r = pentagon_split(p);
  EXPECT_EQ(r.rotation, 2u);
  EXPECT_TRUE(r.fixes.empty());
  EXPECT_TRUE(r.face.is_unit());
  EXPECT_LT((r.rhombi[0].v[0] - p[2]).norm(), 1e-15);
}

TEST(PentagonSplit, FoldedPentagonWithCoincidentVertices) {
  const Point a(0, 0, 0), b(1, 0, 0), z(0.5, 0, -std::sqrt(3.0) / 2.0);
  const std::array<Point, 5> p{a, z, b, a, Point(-1, 0, 0)};
  const auto r = pentagon_split(p);
  const auto& f = r.fixed_pentagon;
  EXPECT_LT(circumradius(f[0], f[2], f[3]), 1.0);
  for (const auto& m : r.fixes) EXPECT_TRUE(m.rhombus.is_unit());
  EXPECT_TRUE(r.rhombi[0].is_unit());
  EXPECT_TRUE(r.rhombi[1].is_unit());
  EXPECT_TRUE(r.face.is_unit());
}

TEST(PentagonSplit, DoubledSpikeRotatesOntoTheEquilateralTriple) {
  const Point a(0, 0, 0), b(1, 0, 0);
  const auto r = pentagon_split({a, b, a, b, Point(0.5, std::sqrt(3.0) / 2.0, 0)});
  EXPECT_EQ(r.rotation, 4u);
  EXPECT_TRUE(r.fixes.empty());
  EXPECT_TRUE(r.face.is_unit());
}

TEST(PentagonSplit, BothApexSidesAreValid) {
  const auto p = as_pentagon(regular_polygon(5));
  for (Side s : {Side::Positive, Side::Negative}) {
    const auto z = apex_at_unit_distance(p[0], p[2], p[3], s);
    ASSERT_TRUE(z.has_value());
    EXPECT_TRUE((Rhombus{{p[0], p[1], p[2], *z}}.is_unit()));
    EXPECT_TRUE((Rhombus{{p[0], *z, p[3], p[4]}}.is_unit()));
  }
  EXPECT_GT(pentagon_split(p).apex.z(), 0.0);
}

TEST(PentagonSplit, RejectsNonUnitInput) {
  const std::array<Point, 5> p{Point(0, 0, 0), Point(2, 0, 0), Point(2, 1, 0), Point(1, 1, 0), Point(0, 1, 0)};
  EXPECT_THROW(pentagon_split(p), Error);
}

TEST(Reduce, TriangleIsItsOwnDome) {
  const IntegralCurve c({{{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0}}});
  const auto l = reduce_to_rhombi(c);
  EXPECT_EQ(l.triangles.size(), 1u);
  EXPECT_TRUE(l.final_rhombi.empty());
  EXPECT_TRUE(l.moves.empty());
  expect_ledger_sound(l);
}

TEST(Reduce, RhombusIsIdentity) {
  const IntegralCurve c({folded_square()});
  const auto l = reduce_to_rhombi(c);
  ASSERT_EQ(l.final_rhombi.size(), 1u);
  EXPECT_TRUE(l.moves.empty());
  for (int k = 0; k < 4; ++k) EXPECT_EQ(l.final_rhombi[0].v[k], folded_square()[k]);
  expect_ledger_sound(l);
}

TEST(Reduce, RegularPentagonUsesTwoRhombi) {
  const IntegralCurve c({regular_polygon(5)});
  const auto l = reduce_to_rhombi(c);
  EXPECT_EQ(l.final_rhombi.size(), 2u);
  EXPECT_EQ(l.triangles.size(), 1u);
  EXPECT_TRUE(l.moves.empty());
  EXPECT_EQ(l.splits.size(), 1u);
  expect_ledger_sound(l);
}

TEST(Reduce, RegularPolygonsSplitIntoPentagons) {
  for (int k = 6; k <= 12; ++k) {
    const auto l = reduce_to_rhombi(IntegralCurve({regular_polygon(k)}));
    EXPECT_EQ(l.splits.size(), static_cast<std::size_t>(k - 4));
    EXPECT_EQ(l.triangles.size(), static_cast<std::size_t>(k - 4));
    expect_ledger_sound(l);
  }
}

TEST(Reduce, MultiComponentCurve) {
  std::mt19937_64 rng(4);
  const auto a = random_closed_curve(9, rng);
  const auto b = random_closed_curve(7, rng);
  const IntegralCurve c({a.component(0), b.component(0), regular_polygon(3), unit_square()});
  const auto l = reduce_to_rhombi(c);
  expect_ledger_sound(l);
  EXPECT_LE(l.final_rhombi.size(), rhombus_budget(9) + rhombus_budget(7) + 1);
  EXPECT_TRUE(l.final_curve.empty());
}

TEST(Reduce, RandomCorpusStaysWithinBudget) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 5 + trial % 30;
    const auto c = random_closed_curve(n, rng);
    const auto l = reduce_to_rhombi(c);
    EXPECT_LE(l.final_rhombi.size(), n * n + 2 * n - 12);
    EXPECT_LE(l.counts.planarize, choose2(n));
    EXPECT_LE(l.counts.pack, choose2(n));
    EXPECT_EQ(l.counts.splits, n - 4);
    expect_ledger_sound(l);
  }
}

TEST(Reduce, IsDeterministic) {
  std::mt19937_64 rng(8);
  const auto c = random_closed_curve(15, rng);
  const auto a = reduce_to_rhombi(c);
  const auto b = reduce_to_rhombi(c);
  ASSERT_EQ(a.final_rhombi.size(), b.final_rhombi.size());
  for (std::size_t i = 0; i < a.final_rhombi.size(); ++i)
    for (int k = 0; k < 4; ++k) EXPECT_EQ(a.final_rhombi[i].v[k], b.final_rhombi[i].v[k]);
}

TEST(Replay, DetectsTamperedMove) {
  std::mt19937_64 rng(5);
  auto l = reduce_to_rhombi(random_closed_curve(10, rng));
  ASSERT_FALSE(l.moves.empty());
  l.moves[0].new_point += Vec3(1e-3, 0, 0);
  try {
    replay_ledger(l);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ReplayMismatch);
  }
}

// Closed lattice walks: every unit step is paired with its reverse, so folds,
// backtracks and repeated vertices are common.
TEST(Reduce, LatticeWalksWithRepeatedVertices) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> axis(0, 2), sign(0, 1);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Vec3> steps;
    for (int i = 0; i < 3 + trial % 6; ++i) {
      Vec3 v = Vec3::Zero();
      v(axis(rng)) = sign(rng) ? 1.0 : -1.0;
      steps.push_back(v);
      steps.push_back(-v);
    }
    std::shuffle(steps.begin(), steps.end(), rng);
    Component c{Point::Zero()};
    for (std::size_t i = 0; i + 1 < steps.size(); ++i) c.push_back(c.back() + steps[i]);
    const IntegralCurve curve({c});
    const auto l = reduce_to_rhombi(curve);
    EXPECT_TRUE(validate_ledger(l).ok()) << "trial " << trial;
    EXPECT_LE(l.final_rhombi.size(), rhombus_budget(curve));
  }
}

TEST(Reduce, SubdividedRectangle) {
  const IntegralCurve c({{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {2, 1, 0}, {1, 1, 0}, {0, 1, 0}}});
  const auto l = reduce_to_rhombi(c);
  EXPECT_TRUE(validate_ledger(l).ok());
  EXPECT_LE(l.final_rhombi.size(), rhombus_budget(c));
}
