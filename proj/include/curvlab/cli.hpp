#pragma once

// Command-line driver. Exit codes: 0 all checks passed, 1 a mathematical check
// failed (details in the report), 2 input or usage error.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curvlab/io.hpp"
#include "curvlab/kaehler.hpp"
#include "curvlab/metric.hpp"
#include "curvlab/obstruction.hpp"
#include "curvlab/report.hpp"

namespace curvlab {

enum class ExitCode : int { ok = 0, check_failed = 1, input_error = 2 };

struct RunConfig {
  std::string command;
  std::string theorem;  // self-dual | ricci-flat | unitary-product
  std::string input_path;
  std::string builder;
  std::string coeffs;
  std::string point = "0,0,0,0";
  double tolerance = 1e-9;
  std::uint64_t seed = 0;
  int restarts = 32;
  Format format = Format::text;
};

namespace cli_detail {

struct OperatorInput {
  CurvatureOperator curvature;
  ComplexStructure structure;
  FrameRotation frame;
};

inline OperatorInput load_operator(const RunConfig& cfg) {
  if (!cfg.builder.empty()) {
    if (!cfg.input_path.empty()) throw InvalidArgument("--input and --builder are mutually exclusive");
    auto [r, j] = builder_from_spec(cfg.builder);
    return {r, j.value_or(ComplexStructure::from_unitary_frame()), FrameRotation::identity()};
  }
  if (cfg.input_path.empty()) throw InvalidArgument("an operator is required (--input or --builder)");
  const Json doc = read_json_file(cfg.input_path);
  return {operator_from_json(doc), structure_from_json(doc), frame_from_json(doc)};
}

inline MetricDocument load_metric(const RunConfig& cfg) {
  if (cfg.input_path.empty()) throw InvalidArgument("a metric file is required (--input)");
  return metric_from_json(read_json_file(cfg.input_path));
}

inline Point load_point(const RunConfig& cfg) {
  const std::vector<double> v = parse_number_list(cfg.point, 4, "--point");
  return {v[0], v[1], v[2], v[3]};
}

inline Json coeffs_json(const KahlerCoeffs& a) { return Json::array({a.a12, a.a13, a.a14}); }

inline ExitCode verdict_exit(Verdict v) {
  return v == Verdict::flat || v == Verdict::conformally_flat_branch || v == Verdict::special_frame_branch
             ? ExitCode::ok
             : ExitCode::check_failed;
}

inline ExitCode run_decompose(const RunConfig& cfg, Json& doc) {
  const OperatorInput in = load_operator(cfg);
  doc = decomposition_report(in.curvature, cfg.tolerance);
  return doc["checks"]["passed"].get<bool>() ? ExitCode::ok : ExitCode::check_failed;
}

inline ExitCode run_kahler_check(const RunConfig& cfg, Json& doc) {
  const OperatorInput in = load_operator(cfg);
  const double tol = cfg.tolerance;
  const KaehlerResiduals res = kaehler_residuals(in.curvature, in.structure, in.frame);
  doc = report_header("kahler-check", tol);
  doc["frame"] = detail::matrix_json(in.frame.matrix());
  doc["coefficients"] = coeffs_json(res.coeffs);
  doc["identities"] = Json(std::vector<double>(res.identities.begin(), res.identities.end()));
  doc["residuals"] = Json{{"max_identity", res.max_identity()},
                          {"commutator", res.commutator},
                          {"fixed_point", res.fixed_point}};
  const bool kaehler = is_kaehler(res, tol);
  doc["kaehler"] = kaehler;
  doc["formulations_agree"] = res.consistent(tol);
  if (!kaehler) return ExitCode::check_failed;

  Json candidates = Json::array();
  for (const ScalarCandidate& c : scalar_from_kaehler(in.curvature, in.structure, in.frame, tol))
    candidates.push_back(Json{{"line", c.line}, {"value", c.value}});
  doc["scalar_curvature"] = scalar_curvature(in.curvature);
  doc["scalar_candidates"] = std::move(candidates);
  const KahlerBlockForm bf = kaehler_block_form(in.curvature, in.structure, in.frame, tol);
  doc["block_form"] = Json{{"weyl_plus_rank_one", bf.weyl_plus_rank_one},
                           {"mixed_rank_one", bf.mixed_rank_one},
                           {"weyl_plus_formula_defect", bf.weyl_plus_formula_defect},
                           {"weyl_minus_formula_defect", bf.weyl_minus_formula_defect},
                           {"weyl_plus_block", detail::matrix_json(bf.weyl_plus_block)},
                           {"mixed_block", detail::matrix_json(bf.mixed_block)},
                           {"weyl_minus_correction", detail::matrix_json(bf.weyl_minus_correction)}};
  const bool certified = bf.weyl_plus_rank_one && bf.mixed_rank_one &&
                         bf.weyl_plus_formula_defect <= tol * std::max(1.0, std::abs(bf.r));
  doc["block_form"]["certified"] = certified;
  return certified ? ExitCode::ok : ExitCode::check_failed;
}

inline ExitCode run_metric_curvature(const RunConfig& cfg, Json& doc) {
  const MetricDocument md = load_metric(cfg);
  const Point p = load_point(cfg);
  const double tol = cfg.tolerance;
  const CurvatureOperator r = curvature_at(md.metric, p);
  const CurvatureOperator oracle = christoffel_oracle(md.metric, p);
  const double scale = std::max(1.0, oracle.frobenius_norm());
  const double oracle_diff = (r.matrix() - oracle.matrix()).cwiseAbs().maxCoeff() / scale;
  const double distinct =
      std::max({std::abs(r(1, 2, 3, 4)), std::abs(r(1, 3, 2, 4)), std::abs(r(1, 4, 2, 3))}) / scale;
  const double bianchi = std::abs(bianchi_defect(r)) / scale;
  const double pair = pair_symmetry_defect(md.metric, p) / scale;

  doc = report_header("metric-curvature", tol);
  doc["point"] = Json(std::vector<double>(p.begin(), p.end()));
  doc["scales"] = md.metric.scales_at(p);
  if (!md.metric.domain_note().empty()) doc["domain"] = md.metric.domain_note();
  doc["matrix"] = detail::matrix_json(r.matrix());
  doc["scalar_curvature"] = scalar_curvature(r);
  doc["residuals"] = Json{{"oracle_difference", oracle_diff},
                          {"distinct_index", distinct},
                          {"bianchi_defect", bianchi},
                          {"pair_symmetry_defect", pair}};
  bool passed = oracle_diff <= tol && distinct <= tol && bianchi <= tol && pair <= tol;
  if (md.j) {
    const std::array<double, 12> nj = nabla_J_residuals(md.metric, *md.j, p);
    double worst = 0.0;
    for (double v : nj) worst = std::max(worst, std::abs(v));
    doc["nabla_J"] = Json(std::vector<double>(nj.begin(), nj.end()));
    doc["residuals"]["nabla_J_max"] = worst;
    doc["parallel_J"] = worst <= tol;
  }
  doc["passed"] = passed;
  return passed ? ExitCode::ok : ExitCode::check_failed;
}

inline ExitCode run_frame_search(const RunConfig& cfg, Json& doc) {
  const OperatorInput in = load_operator(cfg);
  const FrameSearchResult fs = frame_search(in.curvature, cfg.restarts, cfg.seed);
  const KahlerCoeffs a = coeffs_in_frame(in.structure, fs.frame);
  doc = report_header("frame-search", cfg.tolerance);
  doc["seed"] = cfg.seed;
  doc["restarts"] = cfg.restarts;
  doc["verdict"] = fs.found ? "found" : "inconclusive";
  doc["residual"] = fs.residual;
  doc["threshold"] = kFrameFoundThreshold;
  doc["best_restart"] = fs.restart;
  doc["iterations"] = fs.iterations;
  doc["frame"] = detail::matrix_json(fs.frame.matrix());
  doc["coefficients"] = coeffs_json(a);
  doc["squared_coefficients"] = Json::array({a.a12 * a.a12, a.a13 * a.a13, a.a14 * a.a14});
  return fs.found ? ExitCode::ok : ExitCode::check_failed;
}

inline ExitCode run_ricciflat_coeffs(const RunConfig& cfg, Json& doc) {
  const std::vector<double> v = parse_number_list(cfg.coeffs, 3, "--coeffs");
  const KahlerCoeffs a{v[0], v[1], v[2]};
  const double tol = std::min(cfg.tolerance, 1e-8);
  const RicciFlatNullspace ns = ricciflat_nullspace(a, true, tol);
  const RicciFlatNullspace control = ricciflat_nullspace(a, false, tol);
  doc = report_header("ricci-flat-nullspace", tol);
  doc["coefficients"] = coeffs_json(a);
  doc["predicted_dimension"] = 0;
  doc["nullspace_dimension"] = ns.dimension;
  doc["control_dimension"] = control.dimension;
  doc["constraint_rows"] = ns.constraint_rows;
  doc["singular_values"] = Json(std::vector<double>(ns.singular_values.data(),
                                                    ns.singular_values.data() + ns.singular_values.size()));
  Json basis = Json::array();
  for (const CurvatureOperator& b : ns.basis) basis.push_back(detail::matrix_json(b.matrix()));
  doc["basis"] = std::move(basis);
  const bool confirmed = ns.dimension == 0 && control.dimension > 0;
  doc["verdict"] = confirmed ? "confirmed" : "contradicted";
  return confirmed ? ExitCode::ok : ExitCode::check_failed;
}

inline ExitCode run_theorem(const RunConfig& cfg, Json& doc) {
  if (cfg.theorem == "unitary-product") {
    const MetricDocument md = load_metric(cfg);
    const Point p = load_point(cfg);
    const UnitaryProductReport up = unitary_product_check(md.metric, p, cfg.tolerance);
    doc = report_header("unitary-product", cfg.tolerance);
    doc["point"] = Json(std::vector<double>(p.begin(), p.end()));
    Json res = Json::object();
    for (const auto& [name, value] : up.residuals) res[name] = value;
    doc["residuals"] = std::move(res);
    doc["verdict"] = up.is_product ? "local-product" : "not-product";
    return up.is_product ? ExitCode::ok : ExitCode::check_failed;
  }
  if (cfg.theorem == "ricci-flat" && !cfg.coeffs.empty()) return run_ricciflat_coeffs(cfg, doc);
  if (cfg.theorem == "ricci-flat" || cfg.theorem == "self-dual") {
    const OperatorInput in = load_operator(cfg);
    const ObstructionReport rep =
        run_obstruction_suite(in.curvature, in.structure, {cfg.tolerance, cfg.restarts, cfg.seed});
    doc = obstruction_report_to_json(rep);
    doc["theorem"] = cfg.theorem;
    return verdict_exit(rep.verdict);
  }
  throw InvalidArgument("unknown theorem '" + cfg.theorem + "'");
}

}  // namespace cli_detail

/// Runs one command. Reports go to `out`, diagnostics to `err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Curvature-operator laboratory for four-dimensional Kaehler geometry", "curvlab"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string format = "text";
  auto common = [&](CLI::App* sub, bool operator_input, bool metric_input) {
    sub->add_option("--tolerance", cfg.tolerance, "Absolute tolerance for checks")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
    if (operator_input || metric_input) sub->add_option("--input", cfg.input_path, "Input JSON file");
    if (operator_input)
      sub->add_option("--builder", cfg.builder, "Built-in operator: zero, const-hol-sec:c, surface-product:k1,k2");
    if (metric_input)
      sub->add_option("--point", cfg.point, "Evaluation point x1,x2,x3,x4")->capture_default_str();
  };
  auto search_opts = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Seed for random restarts")->capture_default_str();
    sub->add_option("--restarts", cfg.restarts, "Number of restarts")->check(CLI::PositiveNumber)->capture_default_str();
  };

  CLI::App* decompose_cmd = app.add_subcommand("decompose", "Invariant decomposition of a curvature operator");
  common(decompose_cmd, true, false);
  CLI::App* kahler_cmd = app.add_subcommand("kahler-check", "Kaehler identities, scalar relations and block form");
  common(kahler_cmd, true, false);
  CLI::App* metric_cmd = app.add_subcommand("metric-curvature", "Curvature of a diagonal metric at a point");
  common(metric_cmd, false, true);
  CLI::App* search_cmd = app.add_subcommand("frame-search", "Search SO(4) for a frame without distinct-index curvature");
  common(search_cmd, true, false);
  search_opts(search_cmd);
  CLI::App* theorem_cmd = app.add_subcommand("theorem", "Obstruction checks");
  theorem_cmd->add_option("name", cfg.theorem, "self-dual | ricci-flat | unitary-product")
      ->required()
      ->check(CLI::IsMember({"self-dual", "ricci-flat", "unitary-product"}));
  common(theorem_cmd, true, true);
  search_opts(theorem_cmd);
  theorem_cmd->add_option("--coeffs", cfg.coeffs, "Kaehler coefficients a12,a13,a14 (ricci-flat)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return static_cast<int>(ExitCode::input_error);
  }
  cfg.format = format == "json" ? Format::json : Format::text;
  cfg.command = app.get_subcommands().front()->get_name();

  Json doc;
  ExitCode code;
  try {
    if (cfg.command == "decompose") {
      code = cli_detail::run_decompose(cfg, doc);
    } else if (cfg.command == "kahler-check") {
      code = cli_detail::run_kahler_check(cfg, doc);
    } else if (cfg.command == "metric-curvature") {
      code = cli_detail::run_metric_curvature(cfg, doc);
    } else if (cfg.command == "frame-search") {
      code = cli_detail::run_frame_search(cfg, doc);
    } else {
      code = cli_detail::run_theorem(cfg, doc);
    }
  } catch (const ParseError& e) {
    err << "curvlab: parse error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::input_error);
  } catch (const InvalidArgument& e) {
    err << "curvlab: invalid input: " << e.what() << "\n";
    return static_cast<int>(ExitCode::input_error);
  } catch (const PreconditionError& e) {
    err << "curvlab: precondition failed: " << e.what() << "\n";
    return static_cast<int>(ExitCode::check_failed);
  }
  doc["exit_code"] = static_cast<int>(code);
  out << emit_report(doc, cfg.format);
  return static_cast<int>(code);
}

}  // namespace curvlab
