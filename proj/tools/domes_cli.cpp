// Command-line driver: reduce, validate, moduli certificates and census.
// Exit codes: 0 success, 1 semantic failure, 2 input or usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "CLI11.hpp"

#include "domes/domes.hpp"

using namespace domes;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kInputError = 2;

int input_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return kInputError;
}

int failure(const std::string& msg) {
  std::cerr << "failure: " << msg << "\n";
  return kFailure;
}

bool is_input_kind(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse:
    case ErrorKind::NonIntegerEdge:
    case ErrorKind::InvalidCurve:
    case ErrorKind::ComponentTooShort:
    case ErrorKind::UnknownName:
      return true;
    default:
      return false;
  }
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    write_text_file(out_path, text);
}

struct Common {
  std::string in, out;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double tol = Tolerance{}.geom_eps;
  Tolerance tolerance() const { return Tolerance{tol, Tolerance{}.rank_rel_eps}; }
};

int cmd_reduce(const Common& c, const std::string& off_path) {
  const Tolerance tol = c.tolerance();
  IntegralCurve curve;
  try {
    curve = read_curve_file(c.in, tol);
  } catch (const Error& e) {
    return input_error(e.what());
  }
  CobordismLedger ledger;
  try {
    ledger = reduce_to_rhombi(curve, tol);
  } catch (const Error& e) {
    return failure(e.what());
  }
  const auto report = validate_ledger(ledger, tol);
  emit(dump(ledger_to_json(ledger, c.seed_given ? std::optional<std::uint64_t>(c.seed) : std::nullopt)), c.out);
  if (!off_path.empty()) {
    std::ofstream off(off_path);
    if (!off) return input_error("cannot write " + off_path);
    write_off(off, assemble_from_ledger(ledger, tol), tol);
  }
  std::cerr << "n=" << ledger.initial.edge_count() << " k=" << ledger.final_rhombi.size()
            << " budget=" << rhombus_budget(ledger.initial) << "\n";
  if (!report.ok()) {
    for (const auto& chk : report.checks)
      if (!chk.passed) std::cerr << "check " << chk.name << " failed: " << chk.detail << "\n";
    return kFailure;
  }
  return kOk;
}

int cmd_validate(const Common& c) {
  const Tolerance tol = c.tolerance();
  LedgerFile file;
  try {
    file = read_ledger_file(c.in, tol);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) return input_error(e.what());
    return failure(std::string("ledger contents rejected: ") + e.what());
  }
  const auto report = validate_ledger(file.ledger, tol);
  emit(dump(report_to_json(report)), c.out);
  if (!report.ok()) {
    for (const auto& chk : report.checks)
      if (!chk.passed) std::cerr << "check " << chk.name << " failed: " << chk.detail << "\n";
    return kFailure;
  }
  return kOk;
}

PolyhedronRealization trial_realization(const GraphSurface& s, std::uint64_t seed, int trial, const Tolerance& tol) {
  if (trial == 0) return polyhedron_realization(s);
  return polyhedron_realization(s, derive_seed(seed, 0, static_cast<std::uint64_t>(trial)), 0.2, tol);
}

int cmd_moduli(const std::string& sub, const Common& c, const std::string& surface_text, int trials) {
  const Tolerance tol = c.tolerance();
  if (trials < 1) return input_error("--trials must be at least 1");
  SurfaceSpec spec;
  try {
    spec = parse_surface_spec(surface_text);
  } catch (const Error& e) {
    return input_error(e.what());
  }
  Json report;
  report["surface"] = surface_text;
  report["seed"] = c.seed;
  report["trials"] = trials;
  bool ok = true;
  try {
    if (spec.name == "polygon") {
      if (sub != "dims") return input_error("polygon surfaces only support 'dims'");
      const int k = spec.k.value_or(4);
      if (k < 3) return input_error("polygon needs k >= 3");
      Json rows = Json::array();
      for (int t = 0; t < trials; ++t) {
        std::mt19937_64 rng(derive_seed(c.seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(t)));
        const PolygonRealization p{{edge_vectors(random_closed_curve(static_cast<std::size_t>(k), rng, tol).component(0))}};
        const auto d = polygon_dims(p, tol);
        ok = ok && d.tangent == 2 * k - 3 && d.moduli == 2 * k - 6;
        rows.push_back(report_to_json(d));
      }
      report["expected_tangent"] = 2 * k - 3;
      report["expected_moduli"] = 2 * k - 6;
      report["polygons"] = rows;
    } else {
      const GraphSurface s = catalog(spec);
      validate(s);
      if (sub == "dims") {
        const auto q = polyhedron_realization(s);
        report["vertices"] = s.num_vertices;
        report["edge_pairs"] = s.pairs.size();
        report["triangles"] = s.triangles.size();
        report["boundary_components"] = s.walks.size();
        report["closed_euler_characteristic"] = s.closed_euler_characteristic();
        report["cycle_generators"] = cycle_basis(s).size();
        report["tangent_dim"] = polyhedron_tangent_basis(s, q, tol).cols();
        report["residual"] = max_constraint_residual(s, q.q);
        Json polys = Json::array();
        const auto p = boundary_realization(s, q);
        for (const auto& poly : p.polygons) polys.push_back(report_to_json(polygon_dims(PolygonRealization{{poly}}, tol)));
        report["boundary_polygons"] = polys;
      } else if (sub == "isotropy") {
        Json rows = Json::array();
        double worst = 0.0;
        for (int t = 0; t < trials; ++t) {
          const auto r = isotropy_certificate(s, trial_realization(s, c.seed, t, tol), tol);
          worst = std::max(worst, r.ratio);
          ok = ok && r.ratio <= kIsotropyBound && r.residual <= kProjectionTarget;
          rows.push_back(report_to_json(r));
        }
        report["max_ratio"] = worst;
        report["bound"] = kIsotropyBound;
        report["realizations"] = rows;
      } else if (sub == "rank") {
        Json rows = Json::array();
        for (int t = 0; t < trials; ++t) {
          const auto r = rank_certificate(s, trial_realization(s, c.seed, t, tol), tol);
          ok = ok && r.bounds_hold() && r.moduli_info.gap() >= 10.0 && r.projected_info.gap() >= 10.0;
          rows.push_back(report_to_json(r));
        }
        report["realizations"] = rows;
      }
    }
  } catch (const Error& e) {
    if (is_input_kind(e.kind()) || e.kind() == ErrorKind::BoundaryShapeMismatch || e.kind() == ErrorKind::InvalidSurface)
      return input_error(e.what());
    return failure(e.what());
  }
  report["certified"] = ok;
  emit(dump(report), c.out);
  return ok ? kOk : failure("certificate bounds not met");
}

int cmd_census(const Common& c, std::size_t n_min, std::size_t n_max, std::size_t samples, const std::string& csv,
               bool pentagon_fixture) {
  const Tolerance tol = c.tolerance();
  if (n_min < 5 || n_max < n_min) return input_error("need 5 <= n-min <= n-max");
  std::ostringstream out;
  out << kCensusHeader << "\n";
  bool ok = true;
  auto run = [&](const IntegralCurve& curve, std::uint64_t seed) {
    try {
      const auto l = reduce_to_rhombi(curve, tol);
      if (!validate_ledger(l, tol).ok()) {
        ok = false;
        std::cerr << "instance with seed " << seed << " failed validation\n";
      }
      if (l.final_rhombi.size() > rhombus_budget(l.initial)) {
        ok = false;
        std::cerr << "instance with seed " << seed << " exceeded the rhombus budget\n";
      }
      out << to_csv(census_row(l, seed)) << "\n";
    } catch (const Error& e) {
      ok = false;
      std::cerr << "instance with seed " << seed << " failed: " << e.what() << "\n";
    }
  };
  if (pentagon_fixture) {
    const PolygonRealization reg{{regular_polygon_edges(5)}};
    Component pent{Point::Zero()};
    for (int i = 0; i < 4; ++i) pent.push_back(pent.back() + reg.polygons[0][static_cast<std::size_t>(i)]);
    run(IntegralCurve({pent}, tol), 0);
  }
  for (std::size_t n = n_min; n <= n_max; ++n)
    for (std::size_t i = 0; i < samples; ++i) {
      const std::uint64_t seed = derive_seed(c.seed, n, i);
      std::mt19937_64 rng(seed);
      run(random_closed_curve(n, rng, tol), seed);
    }
  if (csv.empty())
    std::cout << out.str();
  else
    write_text_file(csv, out.str());
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unit-rhombus cobordisms of integral curves and moduli certificates"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "64-bit seed for all randomness");
    sub->add_option("--tol", common.tol, "geometric tolerance")->check(CLI::PositiveNumber);
  };

  auto* reduce = app.add_subcommand("reduce", "Reduce a curve file to unit rhombi and write the ledger");
  std::string off_path;
  reduce->add_option("--in", common.in, "curve JSON")->required();
  reduce->add_option("--out", common.out, "ledger JSON (stdout if omitted)");
  reduce->add_option("--off", off_path, "OFF export of the dome cells");
  add_common(reduce);

  auto* validate_cmd = app.add_subcommand("validate", "Check a ledger file");
  validate_cmd->add_option("--in", common.in, "ledger JSON")->required();
  validate_cmd->add_option("--out", common.out, "report JSON (stdout if omitted)");
  add_common(validate_cmd);

  auto* moduli = app.add_subcommand("moduli", "Tangent-space dimensions and boundary-map certificates");
  std::string surface = "antiprism_band:k=4";
  std::string moduli_sub;
  int trials = 1;
  moduli->add_option("check", moduli_sub, "dims, isotropy or rank")
      ->required()
      ->check(CLI::IsMember({"dims", "isotropy", "rank"}));
  moduli->add_option("--surface", surface, "NAME or NAME:k=K");
  moduli->add_option("--trials", trials, "number of realizations");
  moduli->add_option("--out", common.out, "report JSON (stdout if omitted)");
  add_common(moduli);

  auto* census = app.add_subcommand("census", "Reduce random curves and tabulate rhombus counts");
  std::size_t n_min = 6, n_max = 6, samples = 10;
  std::string csv;
  bool pentagon_fixture = false;
  census->add_option("--n-min", n_min, "smallest edge count");
  census->add_option("--n-max", n_max, "largest edge count");
  census->add_option("--samples", samples, "curves per edge count");
  census->add_option("--csv", csv, "CSV output (stdout if omitted)");
  census->add_flag("--pentagon-fixture", pentagon_fixture, "prepend the regular pentagon as a fixture row");
  add_common(census);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }
  common.seed_given = app.get_subcommands().front()->count("--seed") > 0;
  if (!common.tolerance().valid()) return input_error("invalid tolerance");

  try {
    if (reduce->parsed()) return cmd_reduce(common, off_path);
    if (validate_cmd->parsed()) return cmd_validate(common);
    if (moduli->parsed()) return cmd_moduli(moduli_sub, common, surface, trials);
    if (census->parsed()) return cmd_census(common, n_min, n_max, samples, csv, pentagon_fixture);
  } catch (const Error& e) {
    return is_input_kind(e.kind()) ? input_error(e.what()) : failure(e.what());
  } catch (const std::exception& e) {
    return failure(e.what());
  }
  return kInputError;
}
