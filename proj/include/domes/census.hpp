#pragma once

// Random closed unit-edge curves and the rhombus-count census.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "domes/cobordism.hpp"
#include "domes/curve.hpp"
#include "domes/geom.hpp"

namespace domes {

inline Vec3 random_unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    Vec3 v(g(rng), g(rng), g(rng));
    const double len = v.norm();
    if (len > 1e-12) return v / len;
  }
}

/// Closed unit curve with n edges: n-2 uniform random steps closed by two
/// unit edges through a random point of B_1(end) ∩ B_1(start). Endpoints
/// outside the open annulus (0, 2) are resampled.
inline IntegralCurve random_closed_curve(std::size_t n, std::mt19937_64& rng, const Tolerance& tol = {}) {
  if (n < 3) throw Error(ErrorKind::ComponentTooShort, "random curve needs n >= 3");
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (;;) {
    Component c{Point::Zero()};
    for (std::size_t i = 0; i + 2 < n; ++i) c.push_back(c.back() + random_unit_vector(rng));
    const double d = c.back().norm();
    if (d <= 1e-6 || d >= 2.0) continue;
    const Circle3 closing = unit_ball_intersection(c.back(), Point::Zero(), tol);
    c.push_back(circle_point(closing, angle(rng)));
    return IntegralCurve({std::move(c)}, tol);
  }
}

struct CensusRow {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t planarize = 0;
  std::size_t pack = 0;
  std::size_t splits = 0;
  std::size_t fixes = 0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kCensusHeader = "# domes-census v1\nn,k,planarize,pack,splits,fixes,seed";

inline std::string to_csv(const CensusRow& r) {
  return std::to_string(r.n) + "," + std::to_string(r.k) + "," + std::to_string(r.planarize) + "," +
         std::to_string(r.pack) + "," + std::to_string(r.splits) + "," + std::to_string(r.fixes) + "," +
         std::to_string(r.seed);
}

inline CensusRow census_row(const CobordismLedger& l, std::uint64_t seed) {
  return CensusRow{l.initial.edge_count(), l.final_rhombi.size(), l.counts.planarize, l.counts.pack,
                   l.counts.splits, l.counts.fixes, seed};
}

/// Per-instance seed derived from the run seed, so instances are independent.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t n, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(index)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace domes
