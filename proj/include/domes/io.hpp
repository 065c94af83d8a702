#pragma once

// JSON files for curves, cobordism ledgers and certificate reports.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "domes/cobordism.hpp"
#include "domes/curve.hpp"
#include "domes/dome.hpp"
#include "domes/moduli.hpp"

namespace domes {

using Json = nlohmann::ordered_json;

inline constexpr int kFileVersion = 1;

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& why) { throw Error(ErrorKind::Parse, why); }

inline Json point_json(const Point& p) { return Json::array({p.x(), p.y(), p.z()}); }

inline Point json_point(const Json& j) {
  if (!j.is_array() || j.size() != 3) parse_fail("expected a point [x, y, z]");
  for (const auto& c : j)
    if (!c.is_number()) parse_fail("point coordinates must be numbers");
  return Point(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

template <std::size_t N>
Json points_json(const std::array<Point, N>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(point_json(p));
  return a;
}

template <std::size_t N>
std::array<Point, N> json_points(const Json& j) {
  if (!j.is_array() || j.size() != N) parse_fail("expected " + std::to_string(N) + " points");
  std::array<Point, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = json_point(j[i]);
  return out;
}

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline std::size_t json_index(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    parse_fail(std::string("field '") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

inline const Json& json_array(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_array()) parse_fail(std::string("field '") + key + "' must be an array");
  return v;
}

inline Stage parse_stage(const std::string& s) {
  for (Stage st : {Stage::Planarize, Stage::Pack, Stage::PentagonFix})
    if (s == to_string(st)) return st;
  parse_fail("unknown stage '" + s + "'");
}

inline void check_version(const Json& j) {
  const Json& v = field(j, "version");
  if (!v.is_number_integer() || v.get<int>() != kFileVersion) parse_fail("unsupported version");
}

}  // namespace detail

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- curves

inline Json curve_to_json(const std::vector<Component>& comps) {
  Json j;
  j["version"] = kFileVersion;
  Json cs = Json::array();
  for (const auto& c : comps) {
    Json pts = Json::array();
    for (const auto& p : c) pts.push_back(detail::point_json(p));
    cs.push_back(pts);
  }
  j["components"] = cs;
  return j;
}

inline Json curve_to_json(const IntegralCurve& c) { return curve_to_json(c.components()); }

/// Raw vertex lists as written; edges are not checked.
inline std::vector<Component> json_to_components(const Json& j) {
  detail::check_version(j);
  std::vector<Component> out;
  for (const auto& c : detail::json_array(j, "components")) {
    if (!c.is_array()) detail::parse_fail("component must be an array of points");
    Component comp;
    for (const auto& p : c) comp.push_back(detail::json_point(p));
    out.push_back(std::move(comp));
  }
  return out;
}

/// Curve with integer-length edges, subdivided to unit steps.
inline IntegralCurve json_to_curve(const Json& j, const Tolerance& tol = {}) {
  return from_integer_curve(json_to_components(j), tol);
}

/// Curve that must already have unit edges (ledger contents).
inline IntegralCurve json_to_unit_curve(const Json& j, const Tolerance& tol = {}) {
  return IntegralCurve(json_to_components(j), tol);
}

inline IntegralCurve read_curve_file(const std::string& path, const Tolerance& tol = {}) {
  return json_to_curve(parse_json_text(read_text_file(path)), tol);
}

// ---------------------------------------------------------------- ledgers

inline Json move_to_json(const PivotMove& m) {
  Json j;
  j["component"] = m.component;
  j["vertex"] = m.vertex;
  j["old"] = detail::point_json(m.old_point);
  j["new"] = detail::point_json(m.new_point);
  j["rhombus"] = detail::points_json(m.rhombus.v);
  j["degenerate"] = m.degenerate;
  j["stage"] = to_string(m.stage);
  return j;
}

inline PivotMove json_to_move(const Json& j) {
  PivotMove m;
  m.component = detail::json_index(j, "component");
  m.vertex = detail::json_index(j, "vertex");
  m.old_point = detail::json_point(detail::field(j, "old"));
  m.new_point = detail::json_point(detail::field(j, "new"));
  m.rhombus.v = detail::json_points<4>(detail::field(j, "rhombus"));
  const Json& deg = detail::field(j, "degenerate");
  if (!deg.is_boolean()) detail::parse_fail("'degenerate' must be a boolean");
  m.degenerate = deg.get<bool>();
  const Json& st = detail::field(j, "stage");
  if (!st.is_string()) detail::parse_fail("'stage' must be a string");
  m.stage = detail::parse_stage(st.get<std::string>());
  return m;
}

inline Json split_to_json(const PentagonSplit& s) {
  Json j;
  j["component"] = s.component;
  j["peel_point"] = s.peel_point ? detail::point_json(*s.peel_point) : Json(nullptr);
  j["pentagon"] = detail::points_json(s.pentagon);
  j["rotation"] = s.rotation;
  Json fixes = Json::array();
  for (const auto& m : s.fixes) fixes.push_back(move_to_json(m));
  j["fixes"] = fixes;
  j["apex"] = detail::point_json(s.apex);
  j["rhombi"] = Json::array({detail::points_json(s.rhombi[0].v), detail::points_json(s.rhombi[1].v)});
  j["face"] = detail::points_json(s.face.v);
  return j;
}

inline PentagonSplit json_to_split(const Json& j) {
  PentagonSplit s;
  s.component = detail::json_index(j, "component");
  const Json& peel = detail::field(j, "peel_point");
  if (!peel.is_null()) s.peel_point = detail::json_point(peel);
  s.pentagon = detail::json_points<5>(detail::field(j, "pentagon"));
  s.rotation = detail::json_index(j, "rotation");
  for (const auto& m : detail::json_array(j, "fixes")) s.fixes.push_back(json_to_move(m));
  s.apex = detail::json_point(detail::field(j, "apex"));
  const Json& rh = detail::json_array(j, "rhombi");
  if (rh.size() != 2) detail::parse_fail("split needs two rhombi");
  s.rhombi[0].v = detail::json_points<4>(rh[0]);
  s.rhombi[1].v = detail::json_points<4>(rh[1]);
  s.face.v = detail::json_points<3>(detail::field(j, "face"));
  return s;
}

inline Json ledger_to_json(const CobordismLedger& l, std::optional<std::uint64_t> seed = {}) {
  Json j;
  j["version"] = kFileVersion;
  j["initial"] = curve_to_json(l.initial);
  Json moves = Json::array();
  for (const auto& m : l.moves) moves.push_back(move_to_json(m));
  j["moves"] = moves;
  Json splits = Json::array();
  for (const auto& s : l.splits) splits.push_back(split_to_json(s));
  j["splits"] = splits;
  Json tris = Json::array();
  for (const auto& t : l.triangles) tris.push_back(detail::points_json(t.v));
  j["triangles"] = tris;
  Json seams = Json::array();
  for (const auto& s : l.seams) seams.push_back(Json::array({detail::points_json(s.first), detail::points_json(s.second)}));
  j["seams"] = seams;
  Json rhombi = Json::array();
  for (const auto& r : l.final_rhombi) rhombi.push_back(detail::points_json(r.v));
  j["rhombi"] = rhombi;
  j["final_curve"] = curve_to_json(l.final_curve);
  Json stats;
  stats["n"] = l.initial.edge_count();
  stats["k"] = l.final_rhombi.size();
  stats["budget"] = rhombus_budget(l.initial);
  stats["planarize"] = l.counts.planarize;
  stats["pack"] = l.counts.pack;
  stats["splits"] = l.counts.splits;
  stats["fixes"] = l.counts.fixes;
  if (seed) stats["seed"] = *seed;
  j["stats"] = stats;
  return j;
}

struct LedgerFile {
  CobordismLedger ledger;
  std::optional<std::uint64_t> seed;
};

inline LedgerFile json_to_ledger(const Json& j, const Tolerance& tol = {}) {
  detail::check_version(j);
  LedgerFile f;
  CobordismLedger& l = f.ledger;
  l.initial = json_to_unit_curve(detail::field(j, "initial"), tol);
  for (const auto& m : detail::json_array(j, "moves")) l.moves.push_back(json_to_move(m));
  for (const auto& s : detail::json_array(j, "splits")) l.splits.push_back(json_to_split(s));
  for (const auto& t : detail::json_array(j, "triangles")) l.triangles.push_back(TriangleFace{detail::json_points<3>(t)});
  for (const auto& s : detail::json_array(j, "seams")) {
    if (!s.is_array() || s.size() != 2) detail::parse_fail("seam must be a pair of segments");
    l.seams.push_back(SeamPair{detail::json_points<2>(s[0]), detail::json_points<2>(s[1])});
  }
  for (const auto& r : detail::json_array(j, "rhombi")) l.final_rhombi.push_back(Rhombus{detail::json_points<4>(r)});
  l.final_curve = json_to_unit_curve(detail::field(j, "final_curve"), tol);
  const Json& stats = detail::field(j, "stats");
  l.counts.planarize = detail::json_index(stats, "planarize");
  l.counts.pack = detail::json_index(stats, "pack");
  l.counts.splits = detail::json_index(stats, "splits");
  l.counts.fixes = detail::json_index(stats, "fixes");
  if (stats.contains("seed")) f.seed = detail::json_index(stats, "seed");
  return f;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline LedgerFile read_ledger_file(const std::string& path, const Tolerance& tol = {}) {
  return json_to_ledger(parse_json_text(read_text_file(path)), tol);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Parse, "cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------- reports

inline Json report_to_json(const ValidationReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return Json{{"ok", r.ok()}, {"checks", checks}};
}

inline Json singular_values_json(const Eigen::VectorXd& s) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < s.size(); ++i) a.push_back(s(i));
  return a;
}

inline Json rank_info_json(const RankInfo& r) {
  return Json{{"rank", r.rank},
              {"threshold", r.threshold},
              {"smallest_kept", r.smallest_kept},
              {"largest_dropped", r.largest_dropped},
              {"gap", r.gap()},
              {"singular_values", singular_values_json(r.singular_values)}};
}

inline Json report_to_json(const PolygonDims& d) {
  return Json{{"tangent", d.tangent}, {"orbit", d.orbit}, {"moduli", d.moduli}, {"omega_kernel", d.omega_kernel}};
}

inline Json report_to_json(const IsotropyReport& r) {
  return Json{{"max_pairing", r.max_pairing},
              {"omega_scale", r.omega_scale},
              {"ratio", r.ratio},
              {"tangent_dim", r.tangent_dim},
              {"residual", r.residual}};
}

inline Json report_to_json(const RankReport& r) {
  return Json{{"rank_moduli", r.rank_moduli},
              {"rank_projected", r.rank_projected},
              {"m", r.m},
              {"tangent_dim", r.tangent_dim},
              {"bounds_hold", r.bounds_hold()},
              {"residual", r.residual},
              {"moduli", rank_info_json(r.moduli_info)},
              {"projected", rank_info_json(r.projected_info)}};
}

}  // namespace domes
