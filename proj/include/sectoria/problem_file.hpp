#pragma once

// Problem files (JSON, "version": 1):
//
//   {
//     "version": 1,
//     "n": 2,
//     "phi": "exp(z1+z2)",
//     "majorant": {"terms": [{"eps": 1, "a": [1, 0], "a0": 0}, ...],
//                  "delta": 0.5, "b": 1, "C": 0},
//     "contour": {"indent_radius": 0.25, "truncation": 0,
//                 "nodes_per_unit": 20, "pole_exclusion": 0.125},
//     "sigma": 0
//   }
//
// "contour" and each of its fields are optional. "sigma" is a one-variable
// shortcut: it fixes the sector and, when "majorant.terms" is absent,
// stands for the single term sigma |eta|.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "sectoria/continuation.hpp"
#include "sectoria/error.hpp"

namespace sectoria {

struct ProblemFile {
  Problem problem;
  std::optional<double> sigma;
  std::string phi_text;
};

namespace detail {

using nlohmann::json;

[[noreturn]] inline void schema_error(const std::string& field, const std::string& msg) {
  throw Error(ErrorKind::input, "problem file: field '" + field + "': " + msg);
}

inline double number_field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) schema_error(path + key, "missing");
  const auto& v = obj.at(key);
  if (!v.is_number()) schema_error(path + key, "expected a number");
  return v.get<double>();
}

inline double number_or(const json& obj, const std::string& key, const std::string& path, double fallback) {
  return obj.contains(key) ? number_field(obj, key, path) : fallback;
}

}  // namespace detail

inline ProblemFile parse_problem_file(std::string_view text) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::input, std::string("problem file: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) detail::schema_error("<root>", "expected an object");
  if (!doc.contains("version")) detail::schema_error("version", "missing");
  if (!doc["version"].is_number_integer() || doc["version"].get<int>() != 1)
    detail::schema_error("version", "unsupported version (expected 1)");
  if (!doc.contains("n") || !doc["n"].is_number_integer()) detail::schema_error("n", "expected an integer");
  const int n = doc["n"].get<int>();
  if (n < 1 || n > 3) detail::schema_error("n", "must lie in 1..3");
  if (!doc.contains("phi") || !doc["phi"].is_string()) detail::schema_error("phi", "expected an expression string");

  ProblemFile pf;
  pf.phi_text = doc["phi"].get<std::string>();
  if (doc.contains("sigma")) {
    if (n != 1) detail::schema_error("sigma", "only allowed for n = 1");
    pf.sigma = detail::number_field(doc, "sigma", "");
  }

  Majorant m;
  m.n = n;
  const json majorant = doc.contains("majorant") ? doc["majorant"] : json::object();
  if (!majorant.is_object()) detail::schema_error("majorant", "expected an object");
  if (!doc.contains("majorant") && !pf.sigma) detail::schema_error("majorant", "missing");
  m.delta = detail::number_or(majorant, "delta", "majorant.", 0.5);
  m.b = detail::number_or(majorant, "b", "majorant.", 0.0);
  m.bigC = detail::number_or(majorant, "C", "majorant.", 0.0);
  if (!(m.delta > 0.0)) detail::schema_error("majorant.delta", "must be positive");
  if (majorant.contains("terms")) {
    const auto& terms = majorant["terms"];
    if (!terms.is_array()) detail::schema_error("majorant.terms", "expected an array");
    for (std::size_t p = 0; p < terms.size(); ++p) {
      const std::string path = "majorant.terms[" + std::to_string(p) + "].";
      const auto& t = terms[p];
      if (!t.is_object()) detail::schema_error(path.substr(0, path.size() - 1), "expected an object");
      MajorantTerm term;
      const double eps = detail::number_or(t, "eps", path, 1.0);
      if (eps != 1.0 && eps != -1.0) detail::schema_error(path + "eps", "must be +1 or -1");
      term.eps = static_cast<int>(eps);
      if (!t.contains("a") || !t["a"].is_array()) detail::schema_error(path + "a", "expected an array");
      for (const auto& v : t["a"]) {
        if (!v.is_number()) detail::schema_error(path + "a", "expected numbers");
        term.a.push_back(v.get<double>());
      }
      if (static_cast<int>(term.a.size()) != n) detail::schema_error(path + "a", "length must equal n");
      term.a0 = detail::number_or(t, "a0", path, 0.0);
      m.terms.push_back(std::move(term));
    }
  } else if (pf.sigma) {
    m.terms.push_back({1, {*pf.sigma}, 0.0});
  } else {
    detail::schema_error("majorant.terms", "missing");
  }

  ContourSpec spec = ContourSpec::for_delta(m.delta);
  if (doc.contains("contour")) {
    const auto& c = doc["contour"];
    if (!c.is_object()) detail::schema_error("contour", "expected an object");
    spec.indent_radius = detail::number_or(c, "indent_radius", "contour.", spec.indent_radius);
    spec.truncation = detail::number_or(c, "truncation", "contour.", spec.truncation);
    if (c.contains("nodes_per_unit")) {
      if (!c["nodes_per_unit"].is_number_integer()) detail::schema_error("contour.nodes_per_unit", "expected an integer");
      spec.nodes_per_unit = c["nodes_per_unit"].get<int>();
    }
    spec.pole_exclusion = detail::number_or(c, "pole_exclusion", "contour.",
                                            std::min(kDefaultPoleExclusion, spec.indent_radius));
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    detail::schema_error("contour", e.what());
  }

  pf.problem = Problem{InterpolantExpr::parse(pf.phi_text, n), std::move(m), spec};
  return pf;
}

inline ProblemFile load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::input, "cannot open problem file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_problem_file(buf.str());
}

}  // namespace sectoria
