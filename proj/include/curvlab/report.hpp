#pragma once

// Report documents. Every report is an ordered JSON object carrying the tool
// version and the tolerance used; it is emitted either as JSON or as
// line-oriented "key: value" text (nested keys joined by '.').

#include <cstdint>
#include <sstream>
#include <string>

#include "curvlab/curvature.hpp"
#include "curvlab/io.hpp"
#include "curvlab/obstruction.hpp"

#ifndef CURVLAB_VERSION
#define CURVLAB_VERSION "0.1.0"
#endif

namespace curvlab {

inline constexpr const char* kToolVersion = "curvlab " CURVLAB_VERSION;

enum class Format { text, json };

inline Json report_header(const std::string& kind, double tolerance) {
  Json doc;
  doc["tool"] = kToolVersion;
  doc["kind"] = kind;
  doc["tolerance"] = tolerance;
  return doc;
}

// ----------------------------------------------------------------- emission

namespace detail {

inline std::string scalar_text(const Json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline void flatten(const Json& v, const std::string& prefix, std::ostringstream& out) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    return;
  }
  if (v.is_array()) {
    bool nested = false;
    for (const Json& e : v) nested = nested || e.is_structured();
    if (nested && !v.empty() && v.front().is_object()) {
      for (std::size_t k = 0; k < v.size(); ++k) flatten(v[k], prefix + "." + std::to_string(k), out);
      return;
    }
    out << prefix << ": " << v.dump() << "\n";
    return;
  }
  out << prefix << ": " << scalar_text(v) << "\n";
}

}  // namespace detail

/// JSON: one document, two-space indent, trailing newline. Text: one line per leaf.
inline std::string emit_report(const Json& report, Format format) {
  if (format == Format::json) return report.dump(2) + "\n";
  std::ostringstream out;
  detail::flatten(report, "", out);
  return out.str();
}

// ------------------------------------------------------------ decomposition

inline Json decomposition_report(const CurvatureOperator& r, double tol) {
  const Decomposition d = decompose(r);
  const auto parts = d.parts();
  const char* names[] = {"scalar", "traceless_ricci", "weyl_plus", "weyl_minus", "bianchi"};
  double reconstruction = (d.reconstruction().matrix() - r.matrix()).norm();
  double orthogonality = 0.0;
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b)
      orthogonality = std::max(orthogonality, std::abs(frobenius_inner(parts[a]->matrix(), parts[b]->matrix())));

  Json doc = report_header("decomposition", tol);
  doc["scalar_curvature"] = d.r;
  doc["bianchi_defect"] = bianchi_defect(r);
  Json norms;
  for (int k = 0; k < 5; ++k) norms[names[k]] = parts[k]->frobenius_norm();
  doc["norms"] = norms;
  doc["ricci"] = detail::matrix_json(ricci(r));
  const FrameRotation id = FrameRotation::identity();
  doc["weyl_plus_block"] = detail::matrix_json(weyl_block(r, Chirality::plus, id));
  doc["weyl_minus_block"] = detail::matrix_json(weyl_block(r, Chirality::minus, id));
  doc["mixed_block"] = detail::matrix_json(mixed_block(r, id));
  const double scale = std::max(1.0, r.frobenius_norm());
  doc["checks"] = Json{{"reconstruction_error", reconstruction},
                       {"max_part_inner_product", orthogonality},
                       {"passed", reconstruction <= tol * scale && orthogonality <= tol * scale * scale}};
  return doc;
}

// --------------------------------------------------------------- obstruction

inline std::string rational_text(const Rational& q) {
  return q.denominator() == 1 ? std::to_string(q.numerator())
                              : std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

inline Rational rational_from_text(const std::string& s) {
  try {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw InvalidArgument("malformed rational '" + s + "'");
  }
}

inline Json case_to_json(const CSystemCase& c) {
  Json doc;
  doc["label"] = c.label();
  doc["relations"] = Json(std::vector<bool>(c.relation.begin(), c.relation.end()));
  Json basis = Json::array();
  for (const RationalVector& v : c.nullspace) {
    Json row = Json::array();
    for (const Rational& x : v) row.push_back(rational_text(x));
    basis.push_back(std::move(row));
  }
  doc["solution_basis"] = std::move(basis);
  doc["dimension"] = c.nullspace.size();
  doc["verified"] = c.verified;
  return doc;
}

inline CSystemCase case_from_json(const Json& doc) {
  CSystemCase c;
  const auto rel = c_system_relations();
  for (int j = 0; j < 4; ++j) {
    c.relation[j] = doc.at("relations").at(j).get<bool>();
    RationalVector unit{};
    unit[j] = 1;
    c.equations.push_back(c.relation[j] ? rel[j] : unit);
  }
  for (const Json& row : doc.at("solution_basis")) {
    RationalVector v{};
    for (int k = 0; k < 4; ++k) v[k] = rational_from_text(row.at(k).get<std::string>());
    c.nullspace.push_back(v);
  }
  c.verified = doc.at("verified").get<bool>();
  return c;
}

inline Json obstruction_report_to_json(const ObstructionReport& rep) {
  Json doc = report_header("obstruction", rep.tolerance);
  doc["verdict"] = to_string(rep.verdict);
  Json res = Json::object();
  for (const auto& [k, v] : rep.residuals) res[k] = v;
  doc["residuals"] = std::move(res);
  doc["frame"] = rep.frame ? detail::matrix_json(*rep.frame) : Json();
  doc["coefficients"] = rep.coefficients ? Json(*rep.coefficients) : Json();
  Json cases = Json::array();
  for (const CSystemCase& c : rep.cases) cases.push_back(case_to_json(c));
  doc["cases"] = std::move(cases);
  doc["notes"] = rep.notes;
  return doc;
}

inline ObstructionReport obstruction_report_from_json(const Json& doc) {
  try {
    ObstructionReport rep;
    rep.verdict = verdict_from_string(doc.at("verdict").get<std::string>());
    rep.tolerance = doc.at("tolerance").get<double>();
    for (auto it = doc.at("residuals").begin(); it != doc.at("residuals").end(); ++it)
      rep.residuals.emplace_back(it.key(), it.value().is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                                 : it.value().get<double>());
    if (!doc.at("frame").is_null()) rep.frame = detail::square_matrix<4>(doc["frame"], "frame");
    if (!doc.at("coefficients").is_null()) rep.coefficients = doc["coefficients"].get<std::array<double, 3>>();
    for (const Json& c : doc.at("cases")) rep.cases.push_back(case_from_json(c));
    rep.notes = doc.at("notes").get<std::vector<std::string>>();
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("obstruction report: ") + e.what());
  }
}

}  // namespace curvlab
