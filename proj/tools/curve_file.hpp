#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gbspline/gbspline.hpp"

namespace gbs::cli {

/// Malformed or inconsistent curve file (exit code 2).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON curve description: degree, knots, one knot-function entry per
/// nonzero-length interval, and d-dimensional control points.
struct CurveFile {
  int degree = 0;
  std::vector<double> knots;
  std::vector<KnotFunctionSpec> families;
  std::vector<std::vector<double>> control_points;

  std::size_t dimension() const { return control_points.empty() ? 0 : control_points.front().size(); }
};

inline KnotFunctionKind parse_kind(const std::string& s) {
  if (s == "linear") return KnotFunctionKind::linear;
  if (s == "trigonometric") return KnotFunctionKind::trigonometric;
  if (s == "exponential") return KnotFunctionKind::exponential;
  throw ParseError("unknown knot function kind '" + s + "'");
}

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                           const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ParseError("unknown field '" + key + "' in " + where);
  }
}

inline double as_number(const nlohmann::json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError(what + " must be a number");
  return j.get<double>();
}

}  // namespace detail

/// Parses and validates a curve file. Anything the library would reject as
/// a curve definition is reported as ParseError.
inline CurveFile parse_curve_file(std::string_view text, double tol = kDefaultTol) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("curve file must be a JSON object");
  detail::reject_unknown(doc, {"degree", "knots", "families", "control_points"}, "curve file");
  for (const char* key : {"degree", "knots", "families", "control_points"})
    if (!doc.contains(key)) throw ParseError(std::string("missing field '") + key + "'");

  CurveFile cf;
  if (!doc["degree"].is_number_integer()) throw ParseError("degree must be an integer");
  cf.degree = doc["degree"].get<int>();
  if (!doc["knots"].is_array()) throw ParseError("knots must be an array");
  for (const auto& k : doc["knots"]) cf.knots.push_back(detail::as_number(k, "knot"));

  if (!doc["families"].is_array()) throw ParseError("families must be an array");
  for (const auto& f : doc["families"]) {
    if (!f.is_object()) throw ParseError("family entries must be objects");
    detail::reject_unknown(f, {"kind", "omega"}, "family entry");
    if (!f.contains("kind") || !f["kind"].is_string()) throw ParseError("family entry needs a string 'kind'");
    KnotFunctionSpec spec{parse_kind(f["kind"].get<std::string>()), 0.0};
    if (f.contains("omega")) spec.omega = detail::as_number(f["omega"], "omega");
    else if (spec.kind != KnotFunctionKind::linear) throw ParseError("family entry needs 'omega'");
    cf.families.push_back(spec);
  }

  if (!doc["control_points"].is_array()) throw ParseError("control_points must be an array");
  for (const auto& row : doc["control_points"]) {
    std::vector<double> pt;
    if (row.is_array()) {
      for (const auto& x : row) pt.push_back(detail::as_number(x, "control point coordinate"));
    } else {
      pt.push_back(detail::as_number(row, "control point"));
    }
    if (pt.empty()) throw ParseError("control points need at least one coordinate");
    if (!cf.control_points.empty() && pt.size() != cf.control_points.front().size())
      throw ParseError("control points have inconsistent dimensions");
    cf.control_points.push_back(std::move(pt));
  }

  try {
    const KnotVector kv = validate_open_knot_vector(cf.knots, cf.degree);
    if (cf.control_points.size() != kv.basis_count())
      throw ParseError("expected " + std::to_string(kv.basis_count()) + " control points for " +
                       std::to_string(cf.knots.size()) + " knots of degree " + std::to_string(cf.degree) +
                       ", got " + std::to_string(cf.control_points.size()));
    (void)KnotFunctionFamily::from_nonempty(cf.knots, cf.families, tol);
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  return cf;
}

inline CurveFile read_curve_file(const std::string& path, double tol = kDefaultTol) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_curve_file(buf.str(), tol);
}

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string write_curve_file(const CurveFile& cf) {
  std::string out = "{\n  \"degree\": " + std::to_string(cf.degree) + ",\n  \"knots\": [";
  for (std::size_t i = 0; i < cf.knots.size(); ++i) out += (i ? ", " : "") + format_number(cf.knots[i]);
  out += "],\n  \"families\": [";
  for (std::size_t i = 0; i < cf.families.size(); ++i) {
    const auto& f = cf.families[i];
    out += i ? ",\n    " : "\n    ";
    out += std::string("{\"kind\": \"") + kind_name(f.kind) + "\"";
    if (f.kind != KnotFunctionKind::linear) out += ", \"omega\": " + format_number(f.omega);
    out += "}";
  }
  out += cf.families.empty() ? "],\n" : "\n  ],\n";
  out += "  \"control_points\": [";
  for (std::size_t i = 0; i < cf.control_points.size(); ++i) {
    out += i ? ",\n    [" : "\n    [";
    const auto& pt = cf.control_points[i];
    for (std::size_t d = 0; d < pt.size(); ++d) out += (d ? ", " : "") + format_number(pt[d]);
    out += "]";
  }
  out += cf.control_points.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

/// Library view of a curve file: shared basis data plus one scalar curve
/// per coordinate.
struct LoadedCurve {
  KnotVector kv;
  KnotFunctionFamily fam;
  std::vector<std::vector<double>> components;  // [dimension][control point]

  static LoadedCurve from(const CurveFile& cf, double tol = kDefaultTol) {
    KnotVector kv = validate_open_knot_vector(cf.knots, cf.degree);
    KnotFunctionFamily fam = KnotFunctionFamily::from_nonempty(cf.knots, cf.families, tol);
    std::vector<std::vector<double>> comps(cf.dimension(), std::vector<double>(cf.control_points.size()));
    for (std::size_t i = 0; i < cf.control_points.size(); ++i)
      for (std::size_t d = 0; d < cf.dimension(); ++d) comps[d][i] = cf.control_points[i][d];
    return {std::move(kv), std::move(fam), std::move(comps)};
  }

  CurveFile to_file() const {
    CurveFile cf;
    cf.degree = kv.degree();
    cf.knots.assign(kv.knots().begin(), kv.knots().end());
    cf.families = fam.nonempty_specs();
    const std::size_t n = components.empty() ? 0 : components.front().size();
    cf.control_points.assign(n, std::vector<double>(components.size()));
    for (std::size_t d = 0; d < components.size(); ++d)
      for (std::size_t i = 0; i < n; ++i) cf.control_points[i][d] = components[d][i];
    return cf;
  }
};

}  // namespace gbs::cli
