#pragma once

// Combinatorial graph surfaces with boundary, their boundary polygons,
// triangle collapse, homology generators and a small catalog of unit-edge
// examples.

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "domes/error.hpp"
#include "domes/geom.hpp"

namespace domes {

/// Oriented edge id. Pair p carries edges 2p (tail -> head) and 2p + 1
/// (head -> tail), so reversal flips the low bit.
using EdgeId = std::size_t;

inline constexpr EdgeId reverse(EdgeId e) { return e ^ 1u; }
inline constexpr std::size_t pair_of(EdgeId e) { return e >> 1; }
inline constexpr EdgeId forward_edge(std::size_t pair) { return 2 * pair; }
inline constexpr EdgeId backward_edge(std::size_t pair) { return 2 * pair + 1; }

struct EdgePair {
  std::size_t tail = 0;
  std::size_t head = 0;
  double length = 1.0;
};

struct GraphSurface {
  std::size_t num_vertices = 0;
  std::vector<EdgePair> pairs;
  std::vector<std::array<EdgeId, 3>> triangles;
  std::vector<std::vector<EdgeId>> walks;
  std::size_t genus = 0;
  std::vector<Point> positions;  // empty when the surface is purely combinatorial

  std::size_t num_edges() const { return 2 * pairs.size(); }
  std::size_t tail(EdgeId e) const { return e & 1u ? pairs[pair_of(e)].head : pairs[pair_of(e)].tail; }
  std::size_t head(EdgeId e) const { return e & 1u ? pairs[pair_of(e)].tail : pairs[pair_of(e)].head; }
  double length(EdgeId e) const { return pairs[pair_of(e)].length; }

  /// |V| - |E|/2 + |T| + n, the Euler characteristic of the closed-up surface.
  long closed_euler_characteristic() const {
    return static_cast<long>(num_vertices) - static_cast<long>(pairs.size()) + static_cast<long>(triangles.size()) +
           static_cast<long>(walks.size());
  }

  /// q(e) = position(head) - position(tail) for each forward edge.
  std::vector<Vec3> edge_vectors() const {
    std::vector<Vec3> q;
    q.reserve(pairs.size());
    for (const auto& p : pairs) q.push_back(positions.at(p.head) - positions.at(p.tail));
    return q;
  }
};

namespace detail {

inline void surface_fail(const std::string& why) { throw Error(ErrorKind::InvalidSurface, why); }

inline bool closed_walk(const GraphSurface& s, const std::vector<EdgeId>& w) {
  for (std::size_t k = 0; k < w.size(); ++k)
    if (s.head(w[k]) != s.tail(w[(k + 1) % w.size()])) return false;
  return true;
}

}  // namespace detail

/// Each oriented edge x satisfies #(x in triangle boundaries) + #(-x in walks) = 1.
/// This holds exactly when triangles and walks carry one coherent orientation.
inline bool is_orientable(const GraphSurface& s) {
  std::vector<int> count(s.num_edges(), 0);
  for (const auto& t : s.triangles)
    for (EdgeId e : t) ++count.at(e);
  for (const auto& w : s.walks)
    for (EdgeId e : w) ++count.at(reverse(e));
  for (int c : count)
    if (c != 1) return false;
  return true;
}

/// Throws InvalidSurface on structural problems: bad ids, nonpositive lengths,
/// open triangles or walks, flat triangles, edges without exactly two sides,
/// or a wrong Euler count for the claimed genus.
inline void validate(const GraphSurface& s) {
  for (const auto& p : s.pairs) {
    if (p.tail >= s.num_vertices || p.head >= s.num_vertices) detail::surface_fail("edge endpoint out of range");
    if (!(p.length > 0.0)) detail::surface_fail("edge length must be positive");
  }
  std::vector<int> sides(s.pairs.size(), 0);
  for (const auto& t : s.triangles) {
    for (EdgeId e : t) {
      if (e >= s.num_edges()) detail::surface_fail("triangle edge out of range");
      ++sides[pair_of(e)];
    }
    if (!detail::closed_walk(s, {t[0], t[1], t[2]})) detail::surface_fail("triangle boundary is not closed");
    for (int k = 0; k < 3; ++k)
      if (!(s.length(t[k]) + s.length(t[(k + 1) % 3]) > s.length(t[(k + 2) % 3])))
        detail::surface_fail("triangle violates the strict triangle inequality");
  }
  for (const auto& w : s.walks) {
    if (w.empty()) detail::surface_fail("empty boundary walk");
    for (EdgeId e : w) {
      if (e >= s.num_edges()) detail::surface_fail("walk edge out of range");
      ++sides[pair_of(e)];
    }
    if (!detail::closed_walk(s, w)) detail::surface_fail("boundary walk is not closed");
  }
  for (int c : sides)
    if (c != 2) detail::surface_fail("every edge needs exactly two sides");
  if (s.closed_euler_characteristic() != 2 - 2 * static_cast<long>(s.genus))
    detail::surface_fail("Euler count does not match the claimed genus");
  if (!s.positions.empty() && s.positions.size() != s.num_vertices)
    detail::surface_fail("position count differs from vertex count");
}

struct SamplePolygon {
  std::vector<double> lengths;

  bool nondegenerate() const {
    double total = 0.0;
    for (double l : lengths) total += l;
    for (double l : lengths)
      if (!(2.0 * l < total)) return false;
    return lengths.size() >= 3;
  }
};

/// delta: edge j of polygon i maps to surface edge image[i][j].
struct BoundaryMap {
  std::vector<std::vector<EdgeId>> image;
};

struct BoundaryPolygons {
  std::vector<SamplePolygon> polygons;
  BoundaryMap delta;
};

inline BoundaryPolygons boundary_polygons(const GraphSurface& s) {
  BoundaryPolygons out;
  for (const auto& w : s.walks) {
    SamplePolygon p;
    for (EdgeId e : w) p.lengths.push_back(s.length(e));
    out.polygons.push_back(std::move(p));
    out.delta.image.push_back(w);
  }
  return out;
}

struct CollapseResult {
  GraphSurface surface;
  std::vector<std::size_t> pair_origin;  // new pair index -> pair index in the source
};

/// Removes triangle `t` through its boundary edge g: g is replaced by
/// (-e', -e) in its walk where the triangle boundary reads g + e + e'.
inline CollapseResult collapse(const GraphSurface& s, std::size_t t, EdgeId g) {
  if (t >= s.triangles.size()) throw Error(ErrorKind::NotInTriangle, "no such triangle");
  const auto& tri = s.triangles[t];
  std::size_t at = 3;
  for (std::size_t k = 0; k < 3; ++k)
    if (tri[k] == g) at = k;
  if (at == 3) throw Error(ErrorKind::NotInTriangle, "edge is not on the triangle boundary");
  const EdgeId e = tri[(at + 1) % 3];
  const EdgeId e2 = tri[(at + 2) % 3];

  std::size_t walk = s.walks.size(), pos = 0;
  for (std::size_t i = 0; i < s.walks.size() && walk == s.walks.size(); ++i)
    for (std::size_t j = 0; j < s.walks[i].size(); ++j)
      if (s.walks[i][j] == g) {
        walk = i;
        pos = j;
        break;
      }
  if (walk == s.walks.size()) throw Error(ErrorKind::NotBoundaryEdge, "edge does not lie on a boundary walk");

  const std::size_t removed = pair_of(g);
  auto renumber = [removed](EdgeId x) { return pair_of(x) > removed ? x - 2 : x; };

  CollapseResult out;
  GraphSurface& r = out.surface;
  r.num_vertices = s.num_vertices;
  r.genus = s.genus;
  r.positions = s.positions;
  for (std::size_t p = 0; p < s.pairs.size(); ++p)
    if (p != removed) {
      r.pairs.push_back(s.pairs[p]);
      out.pair_origin.push_back(p);
    }
  for (std::size_t k = 0; k < s.triangles.size(); ++k)
    if (k != t) r.triangles.push_back({renumber(s.triangles[k][0]), renumber(s.triangles[k][1]),
                                       renumber(s.triangles[k][2])});
  for (std::size_t i = 0; i < s.walks.size(); ++i) {
    std::vector<EdgeId> w;
    for (std::size_t j = 0; j < s.walks[i].size(); ++j) {
      if (i == walk && j == pos) {
        w.push_back(renumber(reverse(e2)));
        w.push_back(renumber(reverse(e)));
      } else {
        w.push_back(renumber(s.walks[i][j]));
      }
    }
    r.walks.push_back(std::move(w));
  }
  return out;
}

/// Boundary edges of triangle t that lie on a walk, i.e. the ways t can be collapsed.
inline std::vector<EdgeId> collapsible_edges(const GraphSurface& s, std::size_t t) {
  std::vector<EdgeId> out;
  for (EdgeId g : s.triangles.at(t))
    for (const auto& w : s.walks)
      for (EdgeId x : w)
        if (x == g && (out.empty() || out.back() != g)) out.push_back(g);
  return out;
}

/// Integer coefficients on forward edges, one per pair.
using EdgeChain = std::vector<int>;

/// Generators for closed edge cycles modulo triangle boundaries: fundamental
/// cycles of a BFS spanning tree, keeping those independent of the triangle
/// boundaries and of the cycles already kept.
inline std::vector<EdgeChain> cycle_basis(const GraphSurface& s) {
  const std::size_t m = s.pairs.size();
  std::vector<std::vector<EdgeId>> out_edges(s.num_vertices);
  for (std::size_t p = 0; p < m; ++p) {
    out_edges[s.pairs[p].tail].push_back(forward_edge(p));
    out_edges[s.pairs[p].head].push_back(backward_edge(p));
  }
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<EdgeId> parent_edge(s.num_vertices, kNone);
  std::vector<bool> seen(s.num_vertices, false), tree(m, false);
  std::queue<std::size_t> queue;
  if (s.num_vertices > 0) {
    seen[0] = true;
    queue.push(0);
  }
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop();
    for (EdgeId e : out_edges[v]) {
      const std::size_t w = s.head(e);
      if (seen[w]) continue;
      seen[w] = true;
      parent_edge[w] = e;
      tree[pair_of(e)] = true;
      queue.push(w);
    }
  }
  for (bool b : seen)
    if (!b) throw Error(ErrorKind::Disconnected, "surface 1-skeleton is disconnected");

  auto add_edge = [](EdgeChain& c, EdgeId e, int sign) { c[pair_of(e)] += (e & 1u) ? -sign : sign; };
  // Path from the root to v as a chain.
  auto root_path = [&](std::size_t v) {
    EdgeChain c(m, 0);
    while (parent_edge[v] != kNone) {
      add_edge(c, parent_edge[v], 1);
      v = s.tail(parent_edge[v]);
    }
    return c;
  };

  std::vector<EdgeChain> relations;
  for (const auto& t : s.triangles) {
    EdgeChain c(m, 0);
    for (EdgeId e : t) add_edge(c, e, 1);
    relations.push_back(c);
  }
  auto rank_of = [m](const std::vector<EdgeChain>& rows) -> long {
    if (rows.empty()) return 0;
    Eigen::MatrixXd a(rows.size(), m);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < m; ++j) a(i, j) = rows[i][j];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    return lu.rank();
  };

  std::vector<EdgeChain> basis;
  long rank = rank_of(relations);
  for (std::size_t p = 0; p < m; ++p) {
    if (tree[p]) continue;
    EdgeChain c = root_path(s.pairs[p].tail);
    add_edge(c, forward_edge(p), 1);
    const EdgeChain back = root_path(s.pairs[p].head);
    for (std::size_t j = 0; j < m; ++j) c[j] -= back[j];
    relations.push_back(c);
    const long r = rank_of(relations);
    if (r > rank) {
      rank = r;
      basis.push_back(c);
    } else {
      relations.pop_back();
    }
  }
  return basis;
}

// ---------------------------------------------------------------- catalog

namespace detail {

inline std::size_t add_pair(GraphSurface& s, std::size_t tail, std::size_t head) {
  s.pairs.push_back({tail, head, 1.0});
  return s.pairs.size() - 1;
}

}  // namespace detail

/// Single unit equilateral triangle.
inline GraphSurface triangle_disk() {
  GraphSurface s;
  s.num_vertices = 3;
  s.positions = {Point(0, 0, 0), Point(1, 0, 0), Point(0.5, std::sqrt(3.0) / 2.0, 0)};
  detail::add_pair(s, 0, 1);
  detail::add_pair(s, 1, 2);
  detail::add_pair(s, 2, 0);
  s.triangles.push_back({forward_edge(0), forward_edge(1), forward_edge(2)});
  s.walks.push_back({forward_edge(0), forward_edge(1), forward_edge(2)});
  return s;
}

/// Band of 2k unit equilateral triangles between two regular unit k-gons.
inline GraphSurface antiprism_band(int k) {
  if (k < 3) throw Error(ErrorKind::InvalidSurface, "antiprism band needs k >= 3");
  const double pi = std::numbers::pi;
  const double r = 1.0 / (2.0 * std::sin(pi / k));
  const double h = std::sqrt(1.0 - 2.0 * r * r * (1.0 - std::cos(pi / k)));
  const std::size_t n = static_cast<std::size_t>(k);
  GraphSurface s;
  s.num_vertices = 2 * n;
  for (std::size_t j = 0; j < n; ++j) {
    const double a = 2.0 * pi * j / k;
    s.positions.emplace_back(r * std::cos(a), r * std::sin(a), 0.0);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double a = 2.0 * pi * j / k + pi / k;
    s.positions.emplace_back(r * std::cos(a), r * std::sin(a), h);
  }
  auto b = [n](std::size_t j) { return j % n; };
  auto t = [n](std::size_t j) { return n + j % n; };
  std::vector<std::size_t> ring_b(n), ring_t(n), diag(n), rise(n);
  for (std::size_t j = 0; j < n; ++j) ring_b[j] = detail::add_pair(s, b(j), b(j + 1));
  for (std::size_t j = 0; j < n; ++j) ring_t[j] = detail::add_pair(s, t(j), t(j + 1));
  for (std::size_t j = 0; j < n; ++j) diag[j] = detail::add_pair(s, t(j), b(j + 1));
  for (std::size_t j = 0; j < n; ++j) rise[j] = detail::add_pair(s, b(j), t(j));
  for (std::size_t j = 0; j < n; ++j) {
    s.triangles.push_back({forward_edge(ring_b[j]), backward_edge(diag[j]), backward_edge(rise[j])});
    s.triangles.push_back({forward_edge(diag[j]), forward_edge(rise[(j + 1) % n]), backward_edge(ring_t[j])});
  }
  std::vector<EdgeId> bottom, top;
  for (std::size_t j = 0; j < n; ++j) bottom.push_back(forward_edge(ring_b[j]));
  for (std::size_t j = n; j-- > 0;) top.push_back(backward_edge(ring_t[j]));
  s.walks = {bottom, top};
  return s;
}

namespace detail {

// Surface on v1..v5 (ids 0..4) and z (id 5) with unit edges
// a=v1v2 b=v2v3 c=v3v4 d=v4v5 e=v5v1 f=v1z g=zv3 h=v4z.
struct PantsEdges {
  std::size_t a, b, c, d, e, f, g, h;
};

inline PantsEdges add_pants_edges(GraphSurface& s) {
  PantsEdges p{};
  p.a = add_pair(s, 0, 1);
  p.b = add_pair(s, 1, 2);
  p.c = add_pair(s, 2, 3);
  p.d = add_pair(s, 3, 4);
  p.e = add_pair(s, 4, 0);
  p.f = add_pair(s, 0, 5);
  p.g = add_pair(s, 5, 2);
  p.h = add_pair(s, 3, 5);
  return p;
}

}  // namespace detail

/// Regular unit pentagon v1..v5 with the unit triangle [v3 v4 z], z at unit
/// distance from v1, v3, v4. Boundary: the pentagon and the rhombi
/// [v1 z v3 v2] and [v1 v5 v4 z].
inline GraphSurface pentagon_pants() {
  GraphSurface s;
  s.num_vertices = 6;
  const double pi = std::numbers::pi;
  const double r = 1.0 / (2.0 * std::sin(pi / 5.0));
  for (int j = 0; j < 5; ++j) s.positions.emplace_back(r * std::cos(2 * pi * j / 5), r * std::sin(2 * pi * j / 5), 0.0);
  s.positions.push_back(*apex_at_unit_distance(s.positions[0], s.positions[2], s.positions[3], Side::Positive));
  const auto p = detail::add_pants_edges(s);
  s.triangles.push_back({forward_edge(p.c), forward_edge(p.h), forward_edge(p.g)});
  s.walks.push_back({forward_edge(p.a), forward_edge(p.b), forward_edge(p.c), forward_edge(p.d), forward_edge(p.e)});
  s.walks.push_back({forward_edge(p.f), forward_edge(p.g), backward_edge(p.b), backward_edge(p.a)});
  s.walks.push_back({backward_edge(p.e), backward_edge(p.d), forward_edge(p.h), backward_edge(p.f)});
  return s;
}

/// Pants whose three boundary walks are unit rhombi: the pentagon pants with
/// the extra unit triangle [v1 v3 v2] filling in the diagonal v1v3.
inline GraphSurface three_rhombus_pants() {
  GraphSurface s;
  s.num_vertices = 6;
  const double tilt = 70.0 * std::numbers::pi / 180.0;
  const double twist = 50.0 * std::numbers::pi / 180.0;
  const Vec3 d(std::cos(tilt), std::sin(tilt) * std::cos(twist), std::sin(tilt) * std::sin(twist));
  const Point v1(0, 0, 0), v3(1, 0, 0), v2(0.5, -std::sqrt(3.0) / 2.0, 0);
  const Point v4 = v3 + d, v5 = v1 + d;
  s.positions = {v1, v2, v3, v4, v5, *apex_at_unit_distance(v1, v3, v4, Side::Positive)};
  const auto p = detail::add_pants_edges(s);
  const std::size_t m = detail::add_pair(s, 0, 2);
  s.triangles.push_back({forward_edge(p.c), forward_edge(p.h), forward_edge(p.g)});
  s.triangles.push_back({forward_edge(m), backward_edge(p.b), backward_edge(p.a)});
  s.walks.push_back({forward_edge(m), forward_edge(p.c), forward_edge(p.d), forward_edge(p.e)});
  s.walks.push_back({forward_edge(p.f), forward_edge(p.g), backward_edge(p.b), backward_edge(p.a)});
  s.walks.push_back({backward_edge(p.e), backward_edge(p.d), forward_edge(p.h), backward_edge(p.f)});
  return s;
}

struct SurfaceSpec {
  std::string name;
  std::optional<int> k;
};

/// Parses "name" or "name:k=K".
inline SurfaceSpec parse_surface_spec(std::string_view text) {
  SurfaceSpec spec;
  const auto colon = text.find(':');
  spec.name = std::string(text.substr(0, colon));
  if (colon == std::string_view::npos) return spec;
  const std::string_view param = text.substr(colon + 1);
  if (param.substr(0, 2) != "k=") throw Error(ErrorKind::Parse, "expected k=K after ':'");
  int k = 0;
  const auto digits = param.substr(2);
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) throw Error(ErrorKind::Parse, "bad k value");
  spec.k = k;
  return spec;
}

inline GraphSurface catalog(const SurfaceSpec& spec) {
  if (spec.name == "antiprism_band") return antiprism_band(spec.k.value_or(4));
  if (spec.name == "pentagon_pants") return pentagon_pants();
  if (spec.name == "triangle_disk") return triangle_disk();
  if (spec.name == "three_rhombus_pants") return three_rhombus_pants();
  throw Error(ErrorKind::UnknownName, "unknown surface '" + spec.name + "'");
}

inline GraphSurface catalog(std::string_view text) { return catalog(parse_surface_spec(text)); }

}  // namespace domes
