#ifndef SDW_CLI_REPORT_HPP
#define SDW_CLI_REPORT_HPP

// Report assembly and JSON/CSV serialization. Key order is insertion order so
// identical runs serialize byte-identically.

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdw/cli/config.hpp"

namespace sdw::cli {

using Json = nlohmann::ordered_json;

struct Failure {
  std::string code;
  std::string message;
};

struct Report {
  Json config_echo = Json::object();
  std::vector<Json> results;
  double max_residual = 0.0;
  bool pass = true;
  std::optional<Failure> failure;

  void residual(double r) {
    if (std::isnan(r)) return;
    max_residual = std::max(max_residual, r);
  }
};

enum ExitCode { kExitPass = 0, kExitTolerance = 1, kExitPrecondition = 2 };

inline int exit_code(const Report& r) {
  if (r.failure) return kExitPrecondition;
  return r.pass ? kExitPass : kExitTolerance;
}

// Non-finite numbers become null.
inline Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json point_json(const Point& p) {
  Json a = Json::array();
  for (double x : p) a.push_back(num(x));
  return a;
}

template <class C>
Json array_json(const C& c) {
  Json a = Json::array();
  for (double x : c) a.push_back(num(x));
  return a;
}

inline Json config_echo(const RunConfig& c) {
  Json j;
  j["subcommand"] = c.subcommand;
  j["metric"] = c.metric;
  Json p = Json::object();
  for (const auto& [k, v] : c.params) p[k] = num(v);
  j["params"] = p;
  Json g = Json::array();
  for (const auto& a : c.grid) g.push_back(Json{{"coord", a.coord}, {"lo", a.lo}, {"hi", a.hi}, {"count", a.count}});
  j["grid"] = g;
  j["tol"] = c.tol ? num(*c.tol) : Json(nullptr);
  j["fd_step"] = num(c.fd_step);
  j["format"] = c.format == Format::Json ? "json" : "csv";
  if (c.subcommand == "decay-fit") {
    j["field"] = c.field;
    j["expect"] = c.expect ? num(*c.expect) : Json(nullptr);
  }
  if (c.subcommand == "decay-fit" || c.subcommand == "boundary") j["radii"] = c.radii;
  if (c.subcommand == "perturb" || c.subcommand == "boundary") j["family"] = c.family;
  if (c.subcommand == "perturb") j["quantity"] = c.quantity;
  if (c.subcommand == "boundary") j["resolution"] = c.resolution;
  return j;
}

inline std::string to_json(const Report& r) {
  Json j;
  j["config_echo"] = r.config_echo;
  j["results"] = Json(r.results);
  Json s;
  s["max_residual"] = num(r.max_residual);
  s["pass"] = !r.failure && r.pass;
  if (r.failure) s["failure"] = Json{{"error", r.failure->code}, {"message", r.failure->message}};
  j["summary"] = s;
  return j.dump(2) + "\n";
}

inline std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + csv_cell(v[i]);
    return s;
  }
  return v.dump();
}

// Flattened results table; nested objects become dotted column names.
inline void flatten_row(const Json& v, const std::string& prefix, Json& out) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it)
      flatten_row(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else {
    out[prefix] = v;
  }
}

inline std::string to_csv(const Report& r) {
  std::vector<Json> rows;
  if (r.failure) {
    rows.push_back(Json{{"error", r.failure->code}, {"message", r.failure->message}});
  } else {
    for (const auto& row : r.results) {
      Json flat = Json::object();
      flatten_row(row, "", flat);
      rows.push_back(flat);
    }
  }
  std::vector<std::string> cols;
  for (const auto& row : rows)
    for (auto it = row.begin(); it != row.end(); ++it)
      if (std::find(cols.begin(), cols.end(), it.key()) == cols.end()) cols.push_back(it.key());
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + cols[i];
  s += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) s += ",";
      if (row.contains(cols[i])) s += csv_cell(row[cols[i]]);
    }
    s += "\n";
  }
  return s;
}

inline std::string serialize(const Report& r, Format f) { return f == Format::Json ? to_json(r) : to_csv(r); }

}  // namespace sdw::cli

#endif  // SDW_CLI_REPORT_HPP
