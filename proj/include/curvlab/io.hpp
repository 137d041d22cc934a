#pragma once

// JSON input documents.
//
//   operator : {"basis":"lex12-34","matrix":[[6x6]]}
//            | {"components":[{"ijkl":[i,j,k,l],"value":v}, ...]}
//            | {"builder":{"name":"const-hol-sec","c":1}}
//            | {"builder":{"name":"surface-product","k1":1,"k2":-1}}
//              optionally with "J":[[4x4]] or "coeffs":[a12,a13,a14], and "frame":[[4x4]] or "frame":"cp2"
//   structure: {"J":[[4x4]]}
//   metric   : {"a1":"expr","a2":"expr","a3":"expr","a4":"expr"}
//              optionally with "domain":"text" and "J":{"a12":"expr","a13":"expr","a14":"expr"}

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvlab/curvature.hpp"
#include "curvlab/error.hpp"
#include "curvlab/expression.hpp"
#include "curvlab/kaehler.hpp"
#include "curvlab/metric.hpp"
#include "curvlab/obstruction.hpp"

namespace curvlab {

using Json = nlohmann::ordered_json;

/// Parses JSON text, mapping syntax errors to ParseError with the byte offset.
inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("json: ") + e.what(), e.byte);
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

namespace detail {

inline double number_at(const Json& v, const std::string& where) {
  if (!v.is_number()) throw InvalidArgument(where + ": expected a number");
  return v.get<double>();
}

template <int N>
Eigen::Matrix<double, N, N> square_matrix(const Json& v, const std::string& where) {
  const std::string shape = std::to_string(N) + "x" + std::to_string(N);
  if (!v.is_array() || v.size() != N) throw InvalidArgument(where + ": expected a " + shape + " array");
  Eigen::Matrix<double, N, N> m;
  for (int i = 0; i < N; ++i) {
    if (!v[i].is_array() || v[i].size() != N) throw InvalidArgument(where + ": expected a " + shape + " array");
    for (int j = 0; j < N; ++j) m(i, j) = number_at(v[i][j], where);
  }
  return m;
}

template <typename Derived>
Json matrix_json(const Eigen::MatrixBase<Derived>& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline std::vector<double> split_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument(what + ": malformed number '" + item + "'");
    }
  }
  return out;
}

/// Parses "c" or "k1,k2"-style builder specs: "const-hol-sec:1", "surface-product:1,-1", "zero".
inline std::pair<CurvatureOperator, std::optional<ComplexStructure>> builder_from_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::vector<double> args =
      colon == std::string::npos ? std::vector<double>{} : split_numbers(spec.substr(colon + 1), "builder '" + spec + "'");
  if (name == "zero" && args.empty()) return {CurvatureOperator(), std::nullopt};
  if (name == "const-hol-sec" && args.size() == 1)
    return {build_const_hol_sec(args[0]), ComplexStructure::from_unitary_frame()};
  if (name == "surface-product" && args.size() == 2) {
    auto [r, j] = build_surface_product(args[0], args[1]);
    return {r, j};
  }
  throw InvalidArgument("unknown builder '" + spec + "' (expected zero, const-hol-sec:c or surface-product:k1,k2)");
}

inline CurvatureOperator operator_from_json(const Json& doc) {
  if (!doc.is_object()) throw InvalidArgument("operator document must be an object");
  if (doc.contains("matrix")) {
    if (doc.contains("basis") && doc["basis"] != "lex12-34")
      throw InvalidArgument("operator: unsupported basis (expected \"lex12-34\")");
    return CurvatureOperator(detail::square_matrix<6>(doc["matrix"], "matrix"));
  }
  if (doc.contains("components")) {
    const Json& list = doc["components"];
    if (!list.is_array()) throw InvalidArgument("components: expected an array");
    std::vector<ComponentEntry> table;
    for (const Json& e : list) {
      if (!e.is_object() || !e.contains("ijkl") || !e.contains("value") || !e["ijkl"].is_array() ||
          e["ijkl"].size() != 4)
        throw InvalidArgument("components: each entry needs \"ijkl\" (4 indices) and \"value\"");
      std::array<int, 4> idx{};
      for (int k = 0; k < 4; ++k) {
        if (!e["ijkl"][k].is_number_integer()) throw InvalidArgument("components: indices must be integers");
        idx[k] = e["ijkl"][k].get<int>();
      }
      table.push_back({idx[0], idx[1], idx[2], idx[3], detail::number_at(e["value"], "components.value")});
    }
    return from_components(table);
  }
  if (doc.contains("builder")) {
    const Json& b = doc["builder"];
    if (b.is_string()) return builder_from_spec(b.get<std::string>()).first;
    if (!b.is_object() || !b.contains("name") || !b["name"].is_string())
      throw InvalidArgument("builder: expected {\"name\": ...}");
    const std::string name = b["name"];
    if (name == "zero") return CurvatureOperator();
    if (name == "const-hol-sec") return build_const_hol_sec(detail::number_at(b.value("c", Json(1.0)), "builder.c"));
    if (name == "surface-product")
      return build_surface_product(detail::number_at(b.value("k1", Json()), "builder.k1"),
                                   detail::number_at(b.value("k2", Json()), "builder.k2"))
          .first;
    throw InvalidArgument("builder: unknown name '" + name + "'");
  }
  throw InvalidArgument("operator document needs \"matrix\", \"components\" or \"builder\"");
}

inline Json operator_to_json(const CurvatureOperator& r) {
  Json doc;
  doc["basis"] = "lex12-34";
  doc["matrix"] = detail::matrix_json(r.matrix());
  return doc;
}

/// J from "J" (4x4) or "coeffs" ([a12, a13, a14]); the unitary structure if neither is present.
inline ComplexStructure structure_from_json(const Json& doc) {
  if (doc.contains("J")) return ComplexStructure(detail::square_matrix<4>(doc["J"], "J"));
  if (doc.contains("coeffs")) {
    const Json& c = doc["coeffs"];
    if (!c.is_array() || c.size() != 3) throw InvalidArgument("coeffs: expected [a12, a13, a14]");
    return ComplexStructure::from_coeffs({detail::number_at(c[0], "coeffs"), detail::number_at(c[1], "coeffs"),
                                          detail::number_at(c[2], "coeffs")});
  }
  return ComplexStructure::from_unitary_frame();
}

inline Json structure_to_json(const ComplexStructure& j) { return Json{{"J", detail::matrix_json(j.matrix())}}; }

/// Frame from "frame" (4x4, columns are the new axes, or "cp2"); identity if absent.
inline FrameRotation frame_from_json(const Json& doc) {
  if (!doc.contains("frame")) return FrameRotation::identity();
  const Json& f = doc["frame"];
  if (f.is_string()) {
    if (f == "cp2") return cp2_example_frame();
    throw InvalidArgument("frame: unknown name '" + f.get<std::string>() + "'");
  }
  return FrameRotation(detail::square_matrix<4>(f, "frame"));
}

struct MetricDocument {
  DiagonalMetric metric;
  std::optional<JField> j;
};

namespace detail {

inline ScalarField field_at(const Json& doc, const std::string& key) {
  if (!doc.contains(key)) throw InvalidArgument("metric: missing \"" + key + "\"");
  const Json& v = doc[key];
  if (v.is_number()) return ScalarField::constant(v.get<double>());
  if (!v.is_string()) throw InvalidArgument("metric: \"" + key + "\" must be an expression string");
  try {
    return parse_scalar_field(v.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(key + ": " + e.message(), e.position());
  }
}

}  // namespace detail

inline MetricDocument metric_from_json(const Json& doc) {
  if (!doc.is_object()) throw InvalidArgument("metric document must be an object");
  std::array<ScalarField, 4> a;
  for (int i = 0; i < 4; ++i) a[i] = detail::field_at(doc, "a" + std::to_string(i + 1));
  std::string domain;
  if (doc.contains("domain") && doc["domain"].is_string()) domain = doc["domain"];
  MetricDocument out{DiagonalMetric(a, domain), std::nullopt};
  if (doc.contains("J")) {
    const Json& j = doc["J"];
    out.j = JField{{detail::field_at(j, "a12"), detail::field_at(j, "a13"), detail::field_at(j, "a14")}};
  }
  return out;
}

inline Json metric_to_json(const DiagonalMetric& m) {
  Json doc;
  for (int i = 0; i < 4; ++i) doc["a" + std::to_string(i + 1)] = m.scale(i).to_string();
  if (!m.domain_note().empty()) doc["domain"] = m.domain_note();
  return doc;
}

/// Comma-separated list of exactly n numbers.
inline std::vector<double> parse_number_list(const std::string& text, std::size_t n, const std::string& what) {
  std::vector<double> out = split_numbers(text, what);
  if (out.size() != n) throw InvalidArgument(what + ": expected " + std::to_string(n) + " comma-separated numbers");
  return out;
}

}  // namespace curvlab
