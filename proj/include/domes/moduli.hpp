#pragma once

// Numerical tangent spaces of polygon and polyhedron realization schemes,
// the 2-form on polygon tangents, rotation orbits, and the isotropy and rank
// certificates for the boundary map of a graph surface.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "domes/error.hpp"
#include "domes/geom.hpp"
#include "domes/surface.hpp"

namespace domes {

// ---------------------------------------------------------------- linear algebra

struct RankInfo {
  Eigen::VectorXd singular_values;
  long rank = 0;
  double threshold = 0.0;
  double smallest_kept = 0.0;    // 0 when rank is 0
  double largest_dropped = 0.0;  // 0 when nothing is dropped
  double gap() const { return threshold > 0 ? smallest_kept / threshold : 0.0; }
};

inline RankInfo numerical_rank(const Eigen::MatrixXd& a, double rel_eps) {
  RankInfo info;
  if (a.size() == 0) return info;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  info.singular_values = svd.singularValues();
  const double smax = info.singular_values.size() ? info.singular_values(0) : 0.0;
  info.threshold = rel_eps * smax;
  for (Eigen::Index i = 0; i < info.singular_values.size(); ++i) {
    const double s = info.singular_values(i);
    if (smax > 0 && s >= info.threshold) {
      ++info.rank;
      info.smallest_kept = s;
    } else if (info.largest_dropped == 0.0) {
      info.largest_dropped = s;
    }
  }
  return info;
}

/// Orthonormal basis of the null space of `a` (columns). Singular values
/// below rel_eps * max(largest singular value, scale) count as zero.
inline Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double rel_eps, double scale = 0.0) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double ref = std::max(s.size() ? s(0) : 0.0, scale);
  Eigen::Index r = 0;
  while (r < s.size() && ref > 0 && s(r) >= rel_eps * ref) ++r;
  return svd.matrixV().rightCols(n - r);
}

/// Orthonormal basis of the column space of `a`.
inline Eigen::MatrixXd range_basis(const Eigen::MatrixXd& a, double rel_eps) {
  if (a.cols() == 0) return Eigen::MatrixXd(a.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  Eigen::Index r = 0;
  while (r < s.size() && smax > 0 && s(r) >= rel_eps * smax) ++r;
  return svd.matrixU().leftCols(r);
}

/// Principal angles between the column spans of two orthonormal bases.
inline std::vector<double> principal_angles(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2) {
  std::vector<double> out;
  if (q1.cols() == 0 || q2.cols() == 0) return out;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(q1.transpose() * q2);
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    out.push_back(std::acos(std::clamp(svd.singularValues()(i), -1.0, 1.0)));
  return out;
}

/// Largest principal angle, or pi/2 when the dimensions differ.
inline double subspace_distance(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2) {
  if (q1.cols() != q2.cols()) return std::acos(0.0);
  double worst = 0.0;
  for (double a : principal_angles(q1, q2)) worst = std::max(worst, a);
  return worst;
}

inline Eigen::Matrix3d cross_matrix(const Vec3& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

// ---------------------------------------------------------------- polygons

/// Edge vectors of each polygon; tangents are flat vectors laid out polygon
/// by polygon, edge by edge, three coordinates each.
struct PolygonRealization {
  std::vector<std::vector<Vec3>> polygons;

  Eigen::Index dim() const {
    Eigen::Index d = 0;
    for (const auto& p : polygons) d += 3 * static_cast<Eigen::Index>(p.size());
    return d;
  }
  Eigen::Index offset(std::size_t i) const {
    Eigen::Index d = 0;
    for (std::size_t k = 0; k < i; ++k) d += 3 * static_cast<Eigen::Index>(polygons[k].size());
    return d;
  }
  std::size_t num_edges() const {
    std::size_t n = 0;
    for (const auto& p : polygons) n += p.size();
    return n;
  }
};

/// Edge vectors of a closed vertex loop.
inline std::vector<Vec3> edge_vectors(const std::vector<Point>& loop) {
  std::vector<Vec3> e;
  for (std::size_t i = 0; i < loop.size(); ++i) e.push_back(loop[(i + 1) % loop.size()] - loop[i]);
  return e;
}

/// Regular unit k-gon in the xy-plane.
inline std::vector<Vec3> regular_polygon_edges(int k) {
  std::vector<Vec3> e;
  for (int j = 0; j < k; ++j) {
    const double a = 2.0 * std::acos(-1.0) * j / k;
    e.emplace_back(std::cos(a), std::sin(a), 0.0);
  }
  return e;
}

/// Linearized constraints at p: <t(f), p(f)> = 0 per edge, sum t = 0 per polygon.
inline Eigen::MatrixXd polygon_constraint_matrix(const PolygonRealization& p) {
  const Eigen::Index rows = static_cast<Eigen::Index>(p.num_edges() + 3 * p.polygons.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, p.dim());
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < p.polygons.size(); ++i) {
    const Eigen::Index base = p.offset(i);
    for (std::size_t j = 0; j < p.polygons[i].size(); ++j)
      a.block<1, 3>(row++, base + 3 * static_cast<Eigen::Index>(j)) = p.polygons[i][j].transpose();
    for (std::size_t j = 0; j < p.polygons[i].size(); ++j)
      a.block<3, 3>(row, base + 3 * static_cast<Eigen::Index>(j)) = Eigen::Matrix3d::Identity();
    row += 3;
  }
  return a;
}

inline Eigen::MatrixXd polygon_tangent_basis(const PolygonRealization& p, const Tolerance& tol = {}) {
  return null_space(polygon_constraint_matrix(p), tol.rank_rel_eps);
}

/// Matrix W with omega(t, t') = t^T W t': blocks -[p]x / |p|^2 on the diagonal.
inline Eigen::MatrixXd omega_matrix(const PolygonRealization& p) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p.dim(), p.dim());
  for (std::size_t i = 0; i < p.polygons.size(); ++i)
    for (std::size_t j = 0; j < p.polygons[i].size(); ++j) {
      const Vec3& e = p.polygons[i][j];
      const Eigen::Index k = p.offset(i) + 3 * static_cast<Eigen::Index>(j);
      w.block<3, 3>(k, k) = -cross_matrix(e) / e.squaredNorm();
    }
  return w;
}

/// Sum over edges of det[t(f), t'(f), p(f)] / |p(f)|^2.
inline double omega(const PolygonRealization& p, const Eigen::VectorXd& t, const Eigen::VectorXd& t2) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.polygons.size(); ++i)
    for (std::size_t j = 0; j < p.polygons[i].size(); ++j) {
      const Vec3& e = p.polygons[i][j];
      const Eigen::Index k = p.offset(i) + 3 * static_cast<Eigen::Index>(j);
      Eigen::Matrix3d m;
      m.col(0) = t.segment<3>(k);
      m.col(1) = t2.segment<3>(k);
      m.col(2) = e;
      sum += m.determinant() / e.squaredNorm();
    }
  return sum;
}

/// Span of the infinitesimal rotations a_i o p_i, one rotation per polygon.
inline Eigen::MatrixXd so3_orbit_tangent(const PolygonRealization& p, const Tolerance& tol = {}) {
  Eigen::MatrixXd gens = Eigen::MatrixXd::Zero(p.dim(), 3 * static_cast<Eigen::Index>(p.polygons.size()));
  for (std::size_t i = 0; i < p.polygons.size(); ++i)
    for (int axis = 0; axis < 3; ++axis) {
      const Vec3 w = Vec3::Unit(axis);
      const Eigen::Index col = 3 * static_cast<Eigen::Index>(i) + axis;
      for (std::size_t j = 0; j < p.polygons[i].size(); ++j)
        gens.block<3, 1>(p.offset(i) + 3 * static_cast<Eigen::Index>(j), col) = w.cross(p.polygons[i][j]);
    }
  return range_basis(gens, tol.rank_rel_eps);
}

/// Operator norm of omega on unit ambient vectors: the largest 1 / |p(f)|.
inline double omega_norm(const PolygonRealization& p) {
  double n = 0.0;
  for (const auto& poly : p.polygons)
    for (const auto& e : poly) n = std::max(n, 1.0 / e.norm());
  return n;
}

/// Null space of the Gram matrix of omega on a tangent basis, as tangent
/// vectors. The rank threshold is relative to the norm of omega so that an
/// identically vanishing Gram matrix has full kernel.
inline Eigen::MatrixXd kernel_of_omega(const PolygonRealization& p, const Tolerance& tol = {}) {
  const Eigen::MatrixXd b = polygon_tangent_basis(p, tol);
  const Eigen::MatrixXd gram = b.transpose() * omega_matrix(p) * b;
  return b * null_space(gram, tol.rank_rel_eps, omega_norm(p));
}

struct PolygonDims {
  long tangent = 0;
  long orbit = 0;
  long moduli = 0;
  long omega_kernel = 0;
};

inline PolygonDims polygon_dims(const PolygonRealization& p, const Tolerance& tol = {}) {
  PolygonDims d;
  d.tangent = polygon_tangent_basis(p, tol).cols();
  d.orbit = so3_orbit_tangent(p, tol).cols();
  d.moduli = d.tangent - d.orbit;
  d.omega_kernel = kernel_of_omega(p, tol).cols();
  return d;
}

// ---------------------------------------------------------------- polyhedra

/// q(e) for every forward edge of a graph surface; q(-e) = -q(e) is implied.
struct PolyhedronRealization {
  std::vector<Vec3> q;
};

inline Eigen::VectorXd flatten(const std::vector<Vec3>& v) {
  Eigen::VectorXd x(3 * static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x.segment<3>(3 * static_cast<Eigen::Index>(i)) = v[i];
  return x;
}

inline std::vector<Vec3> unflatten(const Eigen::VectorXd& x) {
  std::vector<Vec3> v(static_cast<std::size_t>(x.size() / 3));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x.segment<3>(3 * static_cast<Eigen::Index>(i));
  return v;
}

namespace detail {

inline Vec3 oriented(const std::vector<Vec3>& q, EdgeId e) {
  return (e & 1u) ? Vec3(-q[pair_of(e)]) : q[pair_of(e)];
}

inline void add_oriented_block(Eigen::MatrixXd& a, Eigen::Index row, EdgeId e, double coef) {
  a.block<3, 3>(row, 3 * static_cast<Eigen::Index>(pair_of(e))) +=
      ((e & 1u) ? -coef : coef) * Eigen::Matrix3d::Identity();
}

}  // namespace detail

/// Residuals of (i) |q|^2 - l^2, (iii) triangle sums and (iv) cycle sums.
inline Eigen::VectorXd constraint_residuals(const GraphSurface& s, const std::vector<Vec3>& q,
                                            const std::vector<EdgeChain>& cycles) {
  const Eigen::Index m = static_cast<Eigen::Index>(s.pairs.size());
  Eigen::VectorXd r(m + 3 * static_cast<Eigen::Index>(s.triangles.size() + cycles.size()));
  Eigen::Index row = 0;
  for (std::size_t p = 0; p < s.pairs.size(); ++p) r(row++) = q[p].squaredNorm() - s.pairs[p].length * s.pairs[p].length;
  for (const auto& t : s.triangles) {
    r.segment<3>(row) = detail::oriented(q, t[0]) + detail::oriented(q, t[1]) + detail::oriented(q, t[2]);
    row += 3;
  }
  for (const auto& c : cycles) {
    Vec3 sum = Vec3::Zero();
    for (std::size_t p = 0; p < c.size(); ++p) sum += c[p] * q[p];
    r.segment<3>(row) = sum;
    row += 3;
  }
  return r;
}

inline double max_constraint_residual(const GraphSurface& s, const std::vector<Vec3>& q) {
  const auto r = constraint_residuals(s, q, cycle_basis(s));
  return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

/// Linearized constraints: <s(e), q(e)> = 0, then (iii) and (iv) on s.
inline Eigen::MatrixXd polyhedron_constraint_matrix(const GraphSurface& s, const std::vector<Vec3>& q,
                                                    const std::vector<EdgeChain>& cycles) {
  const Eigen::Index m = static_cast<Eigen::Index>(s.pairs.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 3 * static_cast<Eigen::Index>(s.triangles.size() + cycles.size()), 3 * m);
  Eigen::Index row = 0;
  for (Eigen::Index p = 0; p < m; ++p) a.block<1, 3>(row++, 3 * p) = q[static_cast<std::size_t>(p)].transpose();
  for (const auto& t : s.triangles) {
    for (EdgeId e : t) detail::add_oriented_block(a, row, e, 1.0);
    row += 3;
  }
  for (const auto& c : cycles) {
    for (std::size_t p = 0; p < c.size(); ++p)
      if (c[p] != 0) detail::add_oriented_block(a, row, forward_edge(p), c[p]);
    row += 3;
  }
  return a;
}

inline Eigen::MatrixXd polyhedron_tangent_basis(const GraphSurface& s, const PolyhedronRealization& q,
                                                const Tolerance& tol = {}) {
  return null_space(polyhedron_constraint_matrix(s, q.q, cycle_basis(s)), tol.rank_rel_eps);
}

inline constexpr double kProjectionTarget = 1e-12;

/// Gauss-Newton projection onto the constraint set using minimum-norm steps.
inline std::vector<Vec3> project_to_constraints(const GraphSurface& s, std::vector<Vec3> q, int max_iter = 50) {
  const auto cycles = cycle_basis(s);
  for (int it = 0; it <= max_iter; ++it) {
    const Eigen::VectorXd r = constraint_residuals(s, q, cycles);
    if (r.size() == 0 || r.cwiseAbs().maxCoeff() <= kProjectionTarget) return q;
    if (it == max_iter) break;
    Eigen::MatrixXd j = polyhedron_constraint_matrix(s, q, cycles);
    j.topRows(static_cast<Eigen::Index>(s.pairs.size())) *= 2.0;
    const Eigen::VectorXd step = j.completeOrthogonalDecomposition().solve(r);
    q = unflatten(flatten(q) - step);
  }
  throw Error(ErrorKind::ProjectionDiverged, "constraint residual did not reach 1e-12");
}

/// Realization from the surface coordinates, optionally moved by a random
/// tangent step of length `step` and reprojected onto the constraints.
inline PolyhedronRealization polyhedron_realization(const GraphSurface& s, std::optional<std::uint64_t> seed = {},
                                                    double step = 0.2, const Tolerance& tol = {}) {
  if (s.positions.empty()) throw Error(ErrorKind::InvalidSurface, "surface has no coordinates");
  PolyhedronRealization out{s.edge_vectors()};
  if (!seed) return out;
  std::mt19937_64 rng(*seed);
  std::normal_distribution<double> gauss;
  const Eigen::MatrixXd basis = polyhedron_tangent_basis(s, out, tol);
  if (basis.cols() == 0) return out;
  Eigen::VectorXd c(basis.cols());
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = gauss(rng);
  const Eigen::VectorXd t = basis * c.normalized();
  out.q = project_to_constraints(s, unflatten(flatten(out.q) + step * t));
  return out;
}

/// p = q o delta: polygon i reads q along walk i.
inline PolygonRealization boundary_realization(const GraphSurface& s, const PolyhedronRealization& q) {
  PolygonRealization p;
  for (const auto& w : s.walks) {
    std::vector<Vec3> poly;
    for (EdgeId e : w) poly.push_back(detail::oriented(q.q, e));
    p.polygons.push_back(std::move(poly));
  }
  return p;
}

/// Matrix of d delta: polyhedron tangents (3 per pair) to polygon tangents.
inline Eigen::MatrixXd d_delta_matrix(const GraphSurface& s) {
  Eigen::Index rows = 0;
  for (const auto& w : s.walks) rows += 3 * static_cast<Eigen::Index>(w.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows, 3 * static_cast<Eigen::Index>(s.pairs.size()));
  Eigen::Index row = 0;
  for (const auto& w : s.walks)
    for (EdgeId e : w) {
      detail::add_oriented_block(d, row, e, 1.0);
      row += 3;
    }
  return d;
}

inline Eigen::VectorXd d_delta(const GraphSurface& s, const Eigen::VectorXd& tangent) {
  return d_delta_matrix(s) * tangent;
}

struct IsotropyReport {
  double max_pairing = 0.0;
  double omega_scale = 0.0;  // operator norm of omega at q o delta
  double ratio = 0.0;
  long tangent_dim = 0;
  double residual = 0.0;
};

inline constexpr double kIsotropyBound = 1e-8;

/// Largest |omega(d delta s_a, d delta s_b)| over an orthonormal tangent basis
/// of the surface scheme, with its ratio to the scale of omega at q o delta.
inline IsotropyReport isotropy_certificate(const GraphSurface& s, const PolyhedronRealization& q,
                                           const Tolerance& tol = {}) {
  if (!is_orientable(s)) throw Error(ErrorKind::NotOrientable, "surface is not coherently oriented");
  IsotropyReport r;
  const PolygonRealization p = boundary_realization(s, q);
  const Eigen::MatrixXd w = omega_matrix(p);
  const Eigen::MatrixXd basis = polyhedron_tangent_basis(s, q, tol);
  const Eigen::MatrixXd images = d_delta_matrix(s) * basis;
  r.tangent_dim = basis.cols();
  if (basis.cols() > 0) r.max_pairing = (images.transpose() * w * images).cwiseAbs().maxCoeff();
  r.omega_scale = omega_norm(p);
  r.ratio = r.omega_scale > 0 ? r.max_pairing / r.omega_scale : r.max_pairing;
  r.residual = max_constraint_residual(s, q.q);
  return r;
}

struct RankReport {
  long rank_moduli = 0;
  long rank_projected = 0;
  long m = 0;  // moduli dimension of one boundary 4-gon
  long tangent_dim = 0;
  RankInfo moduli_info;
  RankInfo projected_info;
  double residual = 0.0;

  bool bounds_hold() const { return rank_moduli <= (3 * m) / 2 && rank_projected <= 3 && rank_projected < 2 * m; }
};

namespace detail {

// Rows of `images` belonging to the first `count` polygons, with the rotation
// orbit directions of those polygons projected out.
inline Eigen::MatrixXd modulo_orbits(const PolygonRealization& p, const Eigen::MatrixXd& images, std::size_t count,
                                     const Tolerance& tol) {
  PolygonRealization head;
  head.polygons.assign(p.polygons.begin(), p.polygons.begin() + static_cast<std::ptrdiff_t>(count));
  const Eigen::Index rows = head.dim();
  const Eigen::MatrixXd orbit = so3_orbit_tangent(head, tol);
  const Eigen::MatrixXd top = images.topRows(rows);
  return top - orbit * (orbit.transpose() * top);
}

}  // namespace detail

/// Rank of d delta modulo rotation orbits on all three boundary 4-gons, and
/// after projecting to the first two.
inline RankReport rank_certificate(const GraphSurface& s, const PolyhedronRealization& q, const Tolerance& tol = {}) {
  const auto bp = boundary_polygons(s);
  if (bp.polygons.size() != 3) throw Error(ErrorKind::BoundaryShapeMismatch, "need exactly three boundary polygons");
  for (const auto& poly : bp.polygons)
    if (poly.lengths.size() != 4) throw Error(ErrorKind::BoundaryShapeMismatch, "boundary polygons must be 4-gons");

  RankReport r;
  const PolygonRealization p = boundary_realization(s, q);
  const Eigen::MatrixXd basis = polyhedron_tangent_basis(s, q, tol);
  const Eigen::MatrixXd images = d_delta_matrix(s) * basis;
  r.tangent_dim = basis.cols();
  r.moduli_info = numerical_rank(detail::modulo_orbits(p, images, 3, tol), tol.rank_rel_eps);
  r.projected_info = numerical_rank(detail::modulo_orbits(p, images, 2, tol), tol.rank_rel_eps);
  r.rank_moduli = r.moduli_info.rank;
  r.rank_projected = r.projected_info.rank;
  PolygonRealization first;
  first.polygons.push_back(p.polygons[0]);
  r.m = polygon_dims(first, tol).moduli;
  r.residual = max_constraint_residual(s, q.q);
  return r;
}

/// Restriction of per-pair data along a collapse: new pair p reads old pair origin[p].
inline std::vector<Vec3> restrict_to(const std::vector<Vec3>& q, const std::vector<std::size_t>& origin) {
  std::vector<Vec3> out;
  for (std::size_t p : origin) out.push_back(q.at(p));
  return out;
}

}  // namespace domes
