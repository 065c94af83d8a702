#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "domes/geom.hpp"

using namespace domes;

namespace {

constexpr double kPhi = 1.6180339887498949;

// Closed-form circumradius via Heron, independent of the cross-product route.
double heron_circumradius(double a, double b, double c) {
  const double s = 0.5 * (a + b + c);
  const double area = std::sqrt(s * (s - a) * (s - b) * (s - c));
  return a * b * c / (4.0 * area);
}

Point random_point(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

}  // namespace

TEST(UnitBallIntersection, UnitSeparation) {
  const auto c = unit_ball_intersection({0, 0, 0}, {1, 0, 0});
  EXPECT_NEAR((c.center - Point(0.5, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(c.radius, std::sqrt(3.0) / 2.0, 1e-15);
  EXPECT_NEAR((c.axis - Vec3::UnitX()).norm(), 0.0, 1e-15);
}

TEST(UnitBallIntersection, TangentSpheres) {
  const auto c = unit_ball_intersection({0, 0, 0}, {2, 0, 0});
  EXPECT_NEAR((c.center - Point(1, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_EQ(c.radius, 0.0);
}

TEST(UnitBallIntersection, Errors) {
  try {
    unit_ball_intersection({0, 0, 0}, {3, 0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Separated);
  }
  try {
    unit_ball_intersection({0, 0, 0}, {0, 0, 1e-12});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Coincident);
  }
}

TEST(UnitBallIntersection, SampledPointsAreAtUnitDistance) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Point u = random_point(rng, 3.0);
    Vec3 d = random_point(rng);
    d = d.normalized() * std::uniform_real_distribution<double>(0.01, 2.0)(rng);
    const Point w = u + d;
    const auto c = unit_ball_intersection(u, w);
    for (int k = 0; k < 12; ++k) {
      const Point p = circle_point(c, 2.0 * std::numbers::pi * k / 12.0);
      EXPECT_NEAR(dist(p, u), 1.0, 1e-9);
      EXPECT_NEAR(dist(p, w), 1.0, 1e-9);
    }
  }
}

TEST(Circumradius, EquilateralAndPentagonTriangle) {
  EXPECT_NEAR(circumradius({0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0}),
              1.0 / std::sqrt(3.0), 1e-12);
  // Vertices v1, v3, v4 of a regular unit pentagon: sides phi, 1, phi.
  const double r0 = 1.0 / (2.0 * std::sin(std::numbers::pi / 5.0));
  auto vertex = [&](int k) {
    const double t = 2.0 * std::numbers::pi * k / 5.0;
    return Point(r0 * std::cos(t), r0 * std::sin(t), 0.0);
  };
  const double oracle = heron_circumradius(kPhi, 1.0, kPhi);
  EXPECT_NEAR(oracle, 0.85065080835204, 1e-12);
  EXPECT_NEAR(circumradius(vertex(0), vertex(2), vertex(3)), oracle, 1e-12);
}

TEST(Circumradius, Collinear) {
  EXPECT_THROW(circumradius({0, 0, 0}, {1, 0, 0}, {2, 0, 0}), Error);
  EXPECT_THROW(circumradius({0, 0, 0}, {0, 0, 0}, {2, 0, 0}), Error);
}

TEST(Circumradius, CenterIsEquidistant) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Point a = random_point(rng), b = random_point(rng), c = random_point(rng);
    const Point o = circumcenter(a, b, c);
    const double r = circumradius(a, b, c);
    EXPECT_NEAR(dist(o, a), r, 1e-9);
    EXPECT_NEAR(dist(o, b), r, 1e-9);
    EXPECT_NEAR(dist(o, c), r, 1e-9);
    EXPECT_NEAR(r, heron_circumradius(dist(a, b), dist(b, c), dist(c, a)), 1e-9 * std::max(1.0, r));
  }
}

TEST(Apex, RegularTetrahedron) {
  const Point a{0, 0, 0}, b{1, 0, 0}, c{0.5, std::sqrt(3.0) / 2.0, 0};
  const auto z = apex_at_unit_distance(a, b, c, Side::Positive);
  ASSERT_TRUE(z.has_value());
  EXPECT_NEAR(z->z(), std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_NEAR(((*z).head<2>() - ((a + b + c) / 3.0).head<2>()).norm(), 0.0, 1e-12);
  const auto zneg = apex_at_unit_distance(a, b, c, Side::Negative);
  ASSERT_TRUE(zneg.has_value());
  EXPECT_NEAR(zneg->z(), -std::sqrt(2.0 / 3.0), 1e-12);
}

TEST(Apex, PentagonTriangleHeight) {
  const double r0 = 1.0 / (2.0 * std::sin(std::numbers::pi / 5.0));
  auto vertex = [&](int k) {
    const double t = 2.0 * std::numbers::pi * k / 5.0;
    return Point(r0 * std::cos(t), r0 * std::sin(t), 0.0);
  };
  const auto z = apex_at_unit_distance(vertex(0), vertex(2), vertex(3));
  ASSERT_TRUE(z.has_value());
  const double oracle_r = heron_circumradius(kPhi, 1.0, kPhi);
  EXPECT_NEAR(std::abs(z->z()), std::sqrt(1.0 - oracle_r * oracle_r), 1e-12);
  EXPECT_NEAR(std::abs(z->z()), 0.52573111211913, 1e-9);
}

TEST(Apex, LargeCircumradiusGivesNothing) {
  EXPECT_FALSE(apex_at_unit_distance({0, 0, 0}, {2, 0, 0}, {1, 0.2, 0}).has_value());
}

TEST(Apex, RandomApexIsAtUnitDistance) {
  std::mt19937_64 rng(3);
  int produced = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Point a = random_point(rng, 0.8), b = random_point(rng, 0.8), c = random_point(rng, 0.8);
    for (Side s : {Side::Positive, Side::Negative}) {
      if (auto z = apex_at_unit_distance(a, b, c, s)) {
        ++produced;
        EXPECT_NEAR(dist(*z, a), 1.0, 1e-9);
        EXPECT_NEAR(dist(*z, b), 1.0, 1e-9);
        EXPECT_NEAR(dist(*z, c), 1.0, 1e-9);
      }
    }
  }
  EXPECT_GT(produced, 100);
}

TEST(Reflect, Examples) {
  EXPECT_NEAR((reflect_across_line({0, 1, 0}, {0, 0, 0}, {1, 0, 0}) - Point(0, -1, 0)).norm(), 0, 1e-15);
  EXPECT_NEAR((reflect_across_line({3, 0, 0}, {0, 0, 0}, {1, 0, 0}) - Point(3, 0, 0)).norm(), 0, 1e-15);
  EXPECT_NEAR((reflect_across_line({1, 0, 0}, {0, 0, 0}, {1, 1, 0}) - Point(0, 1, 0)).norm(), 0, 1e-15);
  EXPECT_THROW(reflect_across_line({1, 0, 0}, {0, 0, 0}, {0, 0, 0}), Error);
}

TEST(Reflect, IsometricInvolution) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const Point p = random_point(rng, 2.0), a = random_point(rng), b = random_point(rng);
    const Point r = reflect_across_line(p, a, b);
    EXPECT_NEAR(dist(reflect_across_line(r, a, b), p), 0.0, 1e-12);
    EXPECT_NEAR(dist(r, a), dist(p, a), 1e-12);
    EXPECT_NEAR(dist(r, b), dist(p, b), 1e-12);
  }
}

TEST(NearestPlane, ParallelCircleUsesDeterministicBasis) {
  const Circle3 c{{0, 0, 1}, 1.0, Vec3::UnitZ()};
  const Plane h{{0, 0, 0}, Vec3::UnitZ()};
  const Point p = point_on_circle_nearest_plane(c, h);
  EXPECT_NEAR(distance_to_plane(p, h), 1.0, 1e-15);
  // axis e_z crossed with e_x is e_y.
  EXPECT_NEAR((p - Point(0, 1, 1)).norm(), 0.0, 1e-15);
}

TEST(NearestPlane, CrossingCircleReturnsPlanePoint) {
  const Circle3 c{{0.5, 0, 0.5}, std::sqrt(3.0) / 2.0, Vec3::UnitX()};
  const Plane h{{0, 0, 0}, Vec3::UnitZ()};
  const Point p = point_on_circle_nearest_plane(c, h);
  EXPECT_NEAR(p.z(), 0.0, 1e-12);
  // Analytic solution: y^2 = 3/4 - 1/4.
  EXPECT_NEAR(std::abs(p.y()), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(p.x(), 0.5, 1e-15);
}

TEST(NearestPlane, RadiusZeroReturnsCenter) {
  const Circle3 c{{1, 2, 3}, 0.0, Vec3::UnitX()};
  EXPECT_EQ(point_on_circle_nearest_plane(c, Plane{}), Point(1, 2, 3));
}

TEST(NearestPlane, MatchesDenseSampling) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    Circle3 c{random_point(rng, 2.0), std::uniform_real_distribution<double>(0.1, 1.0)(rng),
              random_point(rng).normalized()};
    Plane h{random_point(rng), random_point(rng).normalized()};
    const double best = distance_to_plane(point_on_circle_nearest_plane(c, h), h);
    double sampled = 1e300;
    for (int k = 0; k < 20000; ++k)
      sampled = std::min(sampled, distance_to_plane(circle_point(c, 2.0 * std::numbers::pi * k / 20000.0), h));
    EXPECT_LE(best, sampled + 1e-12);
    EXPECT_NEAR(best, sampled, 1e-3);
  }
}

TEST(DistanceToPlane, Examples) {
  const Plane h{{0, 0, 0}, Vec3::UnitZ()};
  EXPECT_EQ(distance_to_plane({0, 0, 5}, h), 5.0);
  EXPECT_EQ(distance_to_plane({3, 4, 0}, h), 0.0);
  EXPECT_EQ(distance_to_plane({1, 1, 1}, h), 1.0);
  EXPECT_EQ(distance_to_plane({1, 1, -1}, h), 1.0);
}
