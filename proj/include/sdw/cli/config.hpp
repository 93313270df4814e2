#ifndef SDW_CLI_CONFIG_HPP
#define SDW_CLI_CONFIG_HPP

// Run configuration for the command-line front end: key=value files, grid
// specifications and metric construction.

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sdw/asymptotics.hpp"

namespace sdw::cli {

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s = {"verify-identity", "weitzenbock", "conformal-check",
                                             "detect-kahler",   "norms",       "decay-fit",
                                             "boundary",        "perturb",     "list-catalog"};
  return s;
}

enum class Format { Json, Csv };

// One axis of a sample grid: `count` evenly spaced values in [lo, hi].
struct GridAxis {
  std::string coord;
  double lo = 0.0, hi = 0.0;
  int count = 1;
};

struct RunConfig {
  std::string subcommand;
  std::string metric = "EuclideanSchwarzschild";
  std::map<std::string, double> params;  // catalog parameters plus orientation/amplitude
  std::vector<GridAxis> grid;            // empty: the subcommand's default grid
  std::optional<double> tol;
  double fd_step = 1e-3;
  Format format = Format::Json;
  std::string out;  // empty: stdout
  int threads = 0;
  // subcommand options
  std::string field = "Omega";       // decay-fit
  std::optional<double> expect;      // decay-fit expected exponent
  std::string radii;                 // decay-fit, boundary: lo:hi:n, log-spaced
  std::string family = "mass";       // perturb, boundary
  std::string quantity;              // perturb
  int resolution = 16;               // boundary
};

[[noreturn]] inline void config_error(const std::string& what) { fail(ErrorCode::ConfigParseError, what); }

inline double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    config_error("cannot parse " + what + " '" + s + "'");
  }
  if (used != s.size()) config_error("trailing characters in " + what + " '" + s + "'");
  return v;
}

inline int parse_int(const std::string& s, const std::string& what) {
  const double v = parse_double(s, what);
  if (v != std::floor(v)) config_error(what + " must be an integer");
  return static_cast<int>(v);
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

// "key=value"
inline std::pair<std::string, double> parse_param(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) config_error("parameter '" + kv + "' is not key=value");
  return {trim(kv.substr(0, eq)), parse_double(trim(kv.substr(eq + 1)), "parameter " + kv)};
}

// "coord=lo:hi:n,coord=value,..."
inline std::vector<GridAxis> parse_grid(const std::string& spec) {
  std::vector<GridAxis> axes;
  for (const std::string& item : split(spec, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) config_error("grid axis '" + item + "' is not coord=lo:hi:n");
    GridAxis a;
    a.coord = trim(item.substr(0, eq));
    const auto parts = split(item.substr(eq + 1), ':');
    if (parts.size() == 1) {
      a.lo = a.hi = parse_double(parts[0], "grid value");
    } else if (parts.size() == 3) {
      a.lo = parse_double(parts[0], "grid lower bound");
      a.hi = parse_double(parts[1], "grid upper bound");
      a.count = parse_int(parts[2], "grid count");
    } else {
      config_error("grid axis '" + item + "' is not coord=lo:hi:n");
    }
    if (a.count < 1) config_error("grid count must be positive");
    axes.push_back(a);
  }
  if (axes.empty()) config_error("grid is empty");
  return axes;
}

// "lo:hi:n" log-spaced
inline std::vector<double> parse_radii(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) config_error("radii '" + spec + "' is not lo:hi:n");
  const double lo = parse_double(parts[0], "radius"), hi = parse_double(parts[1], "radius");
  const int n = parse_int(parts[2], "radius count");
  if (!(lo > 0.0) || !(hi > lo) || n < 2) config_error("radii need 0 < lo < hi and n >= 2");
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return r;
}

inline Format parse_format(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  config_error("format must be json or csv, got '" + s + "'");
}

// Applies one key of a config file or flag set.
inline void apply_key(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "subcommand") c.subcommand = value;
  else if (key == "metric") c.metric = value;
  else if (key == "param") c.params.insert_or_assign(parse_param(value).first, parse_param(value).second);
  else if (key == "grid") c.grid = parse_grid(value);
  else if (key == "tol") c.tol = parse_double(value, "tol");
  else if (key == "fd-step") c.fd_step = parse_double(value, "fd-step");
  else if (key == "format") c.format = parse_format(value);
  else if (key == "out") c.out = value;
  else if (key == "threads") c.threads = parse_int(value, "threads");
  else if (key == "field") c.field = value;
  else if (key == "expect") c.expect = parse_double(value, "expect");
  else if (key == "radii") c.radii = value;
  else if (key == "family") c.family = value;
  else if (key == "quantity") c.quantity = value;
  else if (key == "resolution") c.resolution = parse_int(value, "resolution");
  else config_error("unknown key '" + key + "'");
}

// Lines "key = value"; '#' starts a comment; `param` may repeat.
inline void apply_config_text(RunConfig& c, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(lineno) + ": expected key = value");
    apply_key(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

inline void apply_config_file(RunConfig& c, const std::string& path) {
  std::ifstream f(path);
  if (!f) config_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  apply_config_text(c, ss.str());
}

inline void validate(const RunConfig& c) {
  bool known = false;
  for (const auto& s : subcommands()) known = known || s == c.subcommand;
  if (!known) config_error("unknown subcommand '" + c.subcommand + "'");
  if (c.tol && !(*c.tol > 0.0)) config_error("tol must be positive");
  if (!(c.fd_step > 0.0)) config_error("fd-step must be positive");
  if (c.threads < 0) config_error("threads must be nonnegative");
  if (c.resolution < 1) config_error("resolution must be positive");
}

// Metric names: the catalog ids plus AsymmetricBump (generic flat-chart metric)
// and ConformalBump (a conformal bump over Flat). Keys of `params` are the
// catalog parameter names, `orientation` and `amplitude`.
inline MetricSpec make_metric(const RunConfig& c) {
  auto param_or = [&](const std::string& k, double d) {
    const auto it = c.params.find(k);
    return it == c.params.end() ? d : it->second;
  };
  auto orientation_or = [&](int d) {
    const double o = param_or("orientation", d);
    if (o != 1.0 && o != -1.0) config_error("orientation must be +1 or -1");
    return static_cast<int>(o);
  };
  if (c.metric == "AsymmetricBump") return asymmetric_bump_metric(orientation_or(1), param_or("amplitude", 0.3));
  if (c.metric == "ConformalBump") {
    BumpProfile b;
    b.widths = {2.0, 2.0, 2.0, 2.0};
    return conformal_wrap(make_spec(CatalogId::Flat, {}, orientation_or(1)), BumpOmega{b, param_or("amplitude", 0.3)});
  }
  const auto id = catalog_from_string(c.metric);
  if (!id) config_error("unknown metric '" + c.metric + "'");
  const ChartInfo& info = chart_info(*id);
  std::vector<double> prm = info.default_params;
  for (std::size_t i = 0; i < prm.size(); ++i) prm[i] = param_or(std::string(info.param_names[i]), prm[i]);
  for (const auto& [k, v] : c.params) {
    bool ok = k == "orientation" || k == "amplitude";
    for (auto n : info.param_names) ok = ok || k == n;
    if (!ok) config_error("metric " + c.metric + " has no parameter '" + k + "'");
  }
  // default to the orientation in which W+ does not vanish identically
  const int def = info.half_flat_orientation != 0 ? -info.half_flat_orientation : 1;
  return make_spec(*id, prm, orientation_or(def));
}

inline std::vector<GridAxis> default_grid(const MetricSpec& spec) {
  switch (spec.base.id) {
    case CatalogId::EuclideanSchwarzschild: {
      const double m = spec.base.param(0);
      return {{"r", 3.0 * m, 20.0 * m, 6}, {"theta", 0.5, 2.6, 3}};
    }
    case CatalogId::TaubNUT:
    case CatalogId::EguchiHanson: {
      const double a = spec.base.param(0);
      return {{"r", 2.0 * a, 10.0 * a, 4}, {"theta", 0.5, 2.6, 3}};
    }
    case CatalogId::ProductS2xS2: return {{"theta1", 0.5, 2.6, 3}, {"theta2", 0.5, 2.6, 3}};
    default: return {{"x0", -0.6, 0.6, 3}, {"x1", -0.6, 0.6, 3}};
  }
}

// Cartesian product of the axes around the chart reference point, first axis
// slowest.
inline std::vector<Point> grid_points(const MetricSpec& spec, const std::vector<GridAxis>& axes_in) {
  const std::vector<GridAxis> axes = axes_in.empty() ? default_grid(spec) : axes_in;
  const ChartInfo& info = chart_info(spec.base.id);
  std::vector<int> slot;
  for (const auto& a : axes) {
    int s = -1;
    for (int v = 0; v < 4; ++v)
      if (info.coord_names[v] == a.coord) s = v;
    if (s < 0) config_error("chart " + std::string(to_string(spec.base.id)) + " has no coordinate '" + a.coord + "'");
    slot.push_back(s);
  }
  std::vector<Point> pts{reference_point(spec.base)};
  for (std::size_t k = 0; k < axes.size(); ++k) {
    std::vector<Point> next;
    for (const Point& p : pts)
      for (int i = 0; i < axes[k].count; ++i) {
        Point q = p;
        q[slot[k]] = axes[k].count == 1 ? axes[k].lo
                                        : axes[k].lo + (axes[k].hi - axes[k].lo) * i / (axes[k].count - 1);
        next.push_back(q);
      }
    pts = std::move(next);
  }
  for (const Point& p : pts)
    if (!in_chart(spec.base.id, spec.base.params, p)) fail(ErrorCode::PointOutsideChart, "grid point outside chart");
  return pts;
}

}  // namespace sdw::cli

#endif  // SDW_CLI_CONFIG_HPP
