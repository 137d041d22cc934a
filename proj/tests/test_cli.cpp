#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "curvlab/cli.hpp"

using namespace curvlab;

namespace {

const std::string kData = CURVLAB_DATA_DIR;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "curvlab");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return kData + "/" + name; }

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("curvlab_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST(Cli, DecomposeZeroOperatorJson) {
  const CliRun r = run({"decompose", "--builder", "zero", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = parse_json(r.out);
  EXPECT_EQ(doc["tool"], kToolVersion);
  EXPECT_EQ(doc["tolerance"], 1e-9);
  for (const auto& [name, value] : doc["norms"].items()) EXPECT_EQ(value.get<double>(), 0.0) << name;
}

TEST(Cli, DecomposeConstHolSecFile) {
  const CliRun r = run({"decompose", "--input", data("const_hol_sec.json"), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = parse_json(r.out);
  EXPECT_LE(doc["norms"]["weyl_minus"].get<double>(), 1e-9);
  EXPECT_NEAR(doc["scalar_curvature"].get<double>(), 6.0, 1e-12);
  EXPECT_EQ(doc["exit_code"], 0);
}

TEST(Cli, TextFormatIsKeyValueLines) {
  const CliRun r = run({"decompose", "--builder", "const-hol-sec:1"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("tool: curvlab "), std::string::npos);
  EXPECT_NE(r.out.find("tolerance: 1e-09"), std::string::npos);
  EXPECT_NE(r.out.find("norms.weyl_minus: "), std::string::npos);
  EXPECT_NE(r.out.find("checks.passed: true"), std::string::npos);
  std::istringstream lines(r.out);
  for (std::string line; std::getline(lines, line);) EXPECT_NE(line.find(": "), std::string::npos) << line;
}

TEST(Cli, KahlerCheck) {
  EXPECT_EQ(run({"kahler-check", "--input", data("cp2_frame.json")}).code, 0);
  EXPECT_EQ(run({"kahler-check", "--input", data("const_hol_sec.json")}).code, 0);
  EXPECT_EQ(run({"kahler-check", "--builder", "surface-product:1,-2"}).code, 0);
  const Json doc = parse_json(run({"kahler-check", "--input", data("cp2_frame.json"), "--format", "json"}).out);
  for (const Json& a : doc["coefficients"]) EXPECT_NEAR(a.get<double>(), 1.0 / std::sqrt(3.0), 1e-12);
  EXPECT_EQ(doc["scalar_candidates"].size(), 3u);
  EXPECT_TRUE(doc["block_form"]["certified"].get<bool>());

  const std::string id = write_temp("identity.json", R"({"matrix": [[1,0,0,0,0,0],[0,1,0,0,0,0],[0,0,1,0,0,0],
    [0,0,0,1,0,0],[0,0,0,0,1,0],[0,0,0,0,0,1]]})");
  const CliRun bad = run({"kahler-check", "--input", id, "--format", "json"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_FALSE(parse_json(bad.out)["kaehler"].get<bool>());
}

TEST(Cli, MetricCurvature) {
  const CliRun s = run({"metric-curvature", "--input", data("sphere_metric.json"), "--point", "0.1,0.2,-0.3,0.4",
                        "--format", "json"});
  ASSERT_EQ(s.code, 0) << s.err;
  const Json doc = parse_json(s.out);
  EXPECT_NEAR(doc["scalar_curvature"].get<double>(), 12.0, 1e-10);
  EXPECT_EQ(run({"metric-curvature", "--input", data("flat_metric.json")}).code, 0);
  const CliRun p = run({"metric-curvature", "--input", data("product_metric.json"), "--format", "json"});
  EXPECT_EQ(p.code, 0);
  EXPECT_TRUE(parse_json(p.out)["parallel_J"].get<bool>());
}

TEST(Cli, InputErrorsExitTwo) {
  const CliRun bad = run({"metric-curvature", "--input", data("bad_metric.json")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("a1: expression: expected ')' at position 6"), std::string::npos) << bad.err;
  EXPECT_TRUE(bad.out.empty());

  EXPECT_EQ(run({"metric-curvature", "--input", data("missing.json")}).code, 2);
  EXPECT_EQ(run({"metric-curvature", "--input", data("sphere_metric.json"), "--point", "1,2"}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"decompose", "--builder", "zero", "--tolerance", "-1"}).code, 2);
  EXPECT_EQ(run({"decompose", "--builder", "nope:3"}).code, 2);
  EXPECT_EQ(run({"decompose"}).code, 2);
  EXPECT_EQ(run({"decompose", "--builder", "zero", "--input", data("const_hol_sec.json")}).code, 2);
  EXPECT_EQ(run({"theorem", "mystery", "--builder", "zero"}).code, 2);

  const std::string broken = write_temp("broken.json", "{\n  \"matrix\": [1, 2,\n}");
  const CliRun b = run({"decompose", "--input", broken});
  EXPECT_EQ(b.code, 2);
  EXPECT_NE(b.err.find("position"), std::string::npos) << b.err;
}

TEST(Cli, FrameSearchIsDeterministic) {
  const std::vector<std::string> args{"frame-search", "--input", data("const_hol_sec.json"), "--seed", "3",
                                      "--format", "json"};
  const CliRun a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const Json doc = parse_json(a.out);
  EXPECT_EQ(doc["verdict"], "found");
  for (const Json& s : doc["squared_coefficients"]) EXPECT_NEAR(s.get<double>(), 1.0 / 3.0, 1e-6);
}

TEST(Cli, TheoremSelfDual) {
  const CliRun cp2 = run({"theorem", "self-dual", "--input", data("const_hol_sec.json")});
  EXPECT_EQ(cp2.code, 0);
  EXPECT_NE(cp2.out.find("verdict: special-frame-branch"), std::string::npos) << cp2.out;
  EXPECT_EQ(run({"theorem", "self-dual", "--input", data("surface_product.json")}).code, 0);
  EXPECT_EQ(run({"theorem", "self-dual", "--builder", "zero"}).code, 0);
}

TEST(Cli, TheoremRicciFlatExitMatchesReport) {
  const CliRun r = run({"theorem", "ricci-flat", "--coeffs", "1,0,0", "--format", "json"});
  ASSERT_TRUE(r.code == 0 || r.code == 1) << r.err;
  const Json doc = parse_json(r.out);
  const bool confirmed = doc["nullspace_dimension"] == 0 && doc["control_dimension"].get<int>() > 0;
  EXPECT_EQ(doc["verdict"], confirmed ? "confirmed" : "contradicted");
  EXPECT_EQ(r.code, confirmed ? 0 : 1);
  EXPECT_EQ(doc["basis"].size(), doc["nullspace_dimension"].get<std::size_t>());
  EXPECT_EQ(run({"theorem", "ricci-flat", "--coeffs", "1,1,0"}).code, 2);
}

TEST(Cli, TheoremUnitaryProduct) {
  EXPECT_EQ(run({"theorem", "unitary-product", "--input", data("product_metric.json")}).code, 0);
  const CliRun bad = run({"theorem", "unitary-product", "--input", data("exp_x3_metric.json"), "--format", "json"});
  EXPECT_EQ(bad.code, 1);
  const Json doc = parse_json(bad.out);
  EXPECT_EQ(doc["verdict"], "not-product");
  EXPECT_GT(doc["residuals"]["e3(a1)"].get<double>(), 0.5);
}

TEST(Report, ObstructionRoundTrip) {
  const ObstructionReport rep =
      run_obstruction_suite(build_const_hol_sec(1.0), ComplexStructure::from_unitary_frame());
  const Json doc = obstruction_report_to_json(rep);
  const Json again = obstruction_report_to_json(obstruction_report_from_json(parse_json(doc.dump(2))));
  EXPECT_EQ(doc.dump(2), again.dump(2));
  EXPECT_EQ(doc["cases"].size(), 16u);
}

TEST(Report, DecompositionJsonReparsesIdentically) {
  const Json doc = decomposition_report(build_const_hol_sec(1.3), 1e-9);
  const std::string text = emit_report(doc, Format::json);
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(emit_report(parse_json(text), Format::json), text);
}

TEST(Report, OperatorAndMetricDocumentsRoundTrip) {
  const CurvatureOperator r = build_const_hol_sec(1.0 / 3.0);
  const CurvatureOperator back = operator_from_json(parse_json(operator_to_json(r).dump()));
  EXPECT_EQ(back.matrix(), r.matrix());
  const MetricDocument md = metric_from_json(read_json_file(data("sphere_metric.json")));
  const MetricDocument again = metric_from_json(metric_to_json(md.metric));
  const Point p{0.1, -0.2, 0.3, 0.25};
  for (int i = 0; i < 4; ++i) EXPECT_EQ(md.metric.scale(i).evaluate(p), again.metric.scale(i).evaluate(p));
}

TEST(Report, RationalText) {
  EXPECT_EQ(rational_text(Rational(-3, 6)), "-1/2");
  EXPECT_EQ(rational_text(Rational(4)), "4");
  EXPECT_EQ(rational_from_text("-1/2"), Rational(-1, 2));
  EXPECT_THROW(rational_from_text("x"), InvalidArgument);
}
