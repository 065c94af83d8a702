#pragma once

// Reordering of zero-sum planar unit vectors so that every prefix sum stays
// within norm 2.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "domes/error.hpp"
#include "domes/geom.hpp"

namespace domes {

using Vec2 = Eigen::Vector2d;
using Permutation = std::vector<std::size_t>;

inline constexpr double kSteinitzBound = 2.0;

/// Largest prefix-sum norm of `vectors` taken in the order `perm`.
inline double max_prefix_norm(const std::vector<Vec2>& vectors, const Permutation& perm) {
  Vec2 s = Vec2::Zero();
  double worst = 0.0;
  for (std::size_t i : perm) {
    s += vectors[i];
    worst = std::max(worst, s.norm());
  }
  return worst;
}

namespace detail {

inline Permutation greedy_order(const std::vector<Vec2>& u) {
  const std::size_t n = u.size();
  std::vector<bool> used(n, false);
  Permutation perm;
  perm.reserve(n);
  Vec2 s = Vec2::Zero();
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    double best_norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double v = (s + u[j]).norm();
      if (best == n || v < best_norm) {
        best = j;
        best_norm = v;
      }
    }
    used[best] = true;
    perm.push_back(best);
    s += u[best];
  }
  return perm;
}

inline bool backtrack_order(const std::vector<Vec2>& u, double bound, Permutation& perm,
                            std::vector<bool>& used, const Vec2& s) {
  if (perm.size() == u.size()) return true;
  std::vector<std::pair<double, std::size_t>> cand;
  for (std::size_t j = 0; j < u.size(); ++j)
    if (!used[j]) {
      const double v = (s + u[j]).norm();
      if (v <= bound) cand.emplace_back(v, j);
    }
  std::sort(cand.begin(), cand.end());
  for (auto [v, j] : cand) {
    used[j] = true;
    perm.push_back(j);
    if (backtrack_order(u, bound, perm, used, s + u[j])) return true;
    perm.pop_back();
    used[j] = false;
  }
  return false;
}

inline bool beam_order(const std::vector<Vec2>& u, double bound, std::size_t width, Permutation& out) {
  struct State {
    Permutation perm;
    std::vector<bool> used;
    Vec2 sum;
  };
  const std::size_t n = u.size();
  std::vector<State> beam{State{{}, std::vector<bool>(n, false), Vec2::Zero()}};
  for (std::size_t step = 0; step < n; ++step) {
    std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> moves;
    for (std::size_t b = 0; b < beam.size(); ++b)
      for (std::size_t j = 0; j < n; ++j)
        if (!beam[b].used[j]) {
          const double v = (beam[b].sum + u[j]).norm();
          if (v <= bound) moves.push_back({v, {b, j}});
        }
    if (moves.empty()) return false;
    std::sort(moves.begin(), moves.end());
    std::vector<State> next;
    for (std::size_t m = 0; m < moves.size() && next.size() < width; ++m) {
      auto [b, j] = moves[m].second;
      State st = beam[b];
      st.used[j] = true;
      st.perm.push_back(j);
      st.sum += u[j];
      next.push_back(std::move(st));
    }
    beam = std::move(next);
  }
  out = beam.front().perm;
  return true;
}

}  // namespace detail

/// Order of the unit vectors with all prefix-sum norms at most 2 (+ eps).
/// The identity is kept when it already satisfies the bound; otherwise a
/// greedy pass runs, falling back to exhaustive backtracking (n <= 10) or a
/// bounded-width beam search.
inline Permutation steinitz_order(const std::vector<Vec2>& vectors, const Tolerance& tol = {}) {
  const std::size_t n = vectors.size();
  Vec2 total = Vec2::Zero();
  for (const auto& v : vectors) {
    if (std::abs(v.norm() - 1.0) > tol.geom_eps) throw Error(ErrorKind::InvalidCurve, "vector is not unit length");
    total += v;
  }
  if (total.norm() > tol.geom_eps * std::max<std::size_t>(1, n))
    throw Error(ErrorKind::NotClosed, "vectors do not sum to zero");

  const double bound = kSteinitzBound + tol.geom_eps;
  Permutation identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  if (max_prefix_norm(vectors, identity) <= bound) return identity;

  Permutation perm = detail::greedy_order(vectors);
  if (max_prefix_norm(vectors, perm) <= bound) return perm;

  perm.clear();
  if (n <= 10) {
    std::vector<bool> used(n, false);
    if (detail::backtrack_order(vectors, bound, perm, used, Vec2::Zero())) return perm;
  } else if (detail::beam_order(vectors, bound, 256, perm)) {
    return perm;
  }
  throw Error(ErrorKind::SearchFailed, "no bounded rearrangement found");
}

}  // namespace domes
