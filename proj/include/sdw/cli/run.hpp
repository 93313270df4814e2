#ifndef SDW_CLI_RUN_HPP
#define SDW_CLI_RUN_HPP

// Subcommand dispatch. Domain errors become a structured failure record with
// exit code 2; tolerance failures give exit code 1.

#include <fstream>
#include <iostream>
#include <string>

#include "sdw/cli/report.hpp"

namespace sdw::cli {

inline double tol_or(const RunConfig& c, double d) { return c.tol.value_or(d); }

inline void run_verify_identity(const RunConfig& c, const MetricSpec& spec, Report& rep) {
  const double tol = tol_or(c, 1e-6);
  StepPolicy policy;
  policy.initial = c.fd_step;
  policy.target = tol;
  const IdentitySweep sw = verify_main_identity(spec, grid_points(spec, c.grid), policy, c.threads);
  for (const IdentityReport& r : sw.rows) {
    Json j;
    j["point"] = point_json(r.point);
    j["divV"] = num(r.divV);
    j["A"] = num(r.A);
    j["B"] = num(r.B);
    j["residual"] = num(r.residual);
    j["relative_residual"] = num(r.relative_residual);
    j["fd_step"] = num(r.fd_step);
    j["observed_order"] = num(r.observed_order);
    j["divV_spectral"] = num(r.divV_spectral);
    j["star_v_residual"] = num(r.star_v_residual);
    j["lambdas"] = array_json(r.lambdas);
    j["gap"] = num(r.gap);
    rep.results.push_back(j);
    rep.residual(r.relative_residual);
  }
  rep.pass = sw.max_relative_residual <= tol;
}

inline void run_weitzenbock(const RunConfig& c, const MetricSpec& spec, Report& rep) {
  const double tol = tol_or(c, 1e-8);
  const auto pts = grid_points(spec, c.grid);
  const auto rows = parallel_map<Json>(
      pts.size(),
      [&](std::size_t i) {
        const auto f = AnalyticTwoForm::random(1000 + i, pts[i]);
        const auto z = AnalyticPairField::random(2000 + i, pts[i]);
        const WeitzenbockReport w = weitzenbock_check(spec, pts[i], f, z);
        const SelfDualLaplacianReport s = sd_laplacian_check(spec, pts[i], f, z);
        Json j;
        j["point"] = point_json(pts[i]);
        j["two_form"] = num(w.two_form.relative());
        j["pair"] = num(w.pair_form.relative());
        j["two_form_self_dual"] = num(s.two_form.relative());
        j["pair_self_dual"] = num(s.pair_form.relative());
        return j;
      },
      c.threads);
  for (const Json& j : rows) {
    for (const char* k : {"two_form", "pair", "two_form_self_dual", "pair_self_dual"}) rep.residual(j[k].get<double>());
    rep.results.push_back(j);
  }
  rep.pass = rep.max_residual <= tol;
}

inline void run_conformal_check(const RunConfig& c, const MetricSpec& spec, Report& rep) {
  const double tol = tol_or(c, 1e-8);
  const auto pts = grid_points(spec, c.grid);
  const auto res = parallel_map<IdentityResidual>(
      pts.size(), [&](std::size_t i) { return conformal_divergence_check(spec, pts[i]); }, c.threads);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    rep.results.push_back(Json{{"point", point_json(pts[i])},
                               {"residual", num(res[i].residual)},
                               {"scale", num(res[i].scale)},
                               {"relative_residual", num(res[i].relative())}});
    rep.residual(res[i].relative());
  }
  rep.pass = rep.max_residual <= tol;
}

inline void run_detect_kahler(const RunConfig& c, const MetricSpec& spec, Report& rep) {
  const auto pts = grid_points(spec, c.grid);
  const KahlerVerdict v = check_parallel(spec, pts, tol_or(c, 1e-6), c.threads);
  Json j;
  j["verdict"] = std::string(to_string(v.verdict));
  j["max_nablaF"] = num(v.max_nablaF);
  j["max_nablaF_abs"] = num(v.max_nablaF_abs);
  j["max_nablaF_unrescaled"] = num(v.max_nablaF_unrescaled);
  j["max_dF"] = num(v.max_dF);
  j["worst_point"] = point_json(pts[v.worst_point]);
  j["degenerate_points"] = v.degenerate_points;
  j["eigen_split"] = num(v.eigen_pattern.max_split);
  j["eigen_half_defect"] = num(v.eigen_pattern.max_half_defect);
  j["double_eigenvalue"] = v.eigen_pattern.double_eigenvalue;
  rep.results.push_back(j);
  rep.residual(v.max_nablaF);
  rep.pass = true;  // a verdict is the result
}

inline void run_norms(const RunConfig& c, const MetricSpec& spec, Report& rep) {
  const double tol = tol_or(c, 1e-10);
  const NormIdentityReport r = norm_identities_check(spec, grid_points(spec, c.grid), c.threads);
  for (const auto& row : r.rows) {
    rep.results.push_back(Json{{"point", point_json(row.point)},
                               {"Omega", num(row.omega)},
                               {"Fhat_norm", num(row.fhat_norm)},
                               {"epshat_norm", num(row.eps_norm)},
                               {"ghat_inv_norm", num(row.ginv_norm)},
                               {"relative_residual", num(row.max_relative)}});
    rep.residual(row.max_relative);
  }
  rep.pass = r.max_relative <= tol;
}

inline void run_decay_fit(const RunConfig& c, const MetricSpec& spec, Report& rep) {
  const auto field = decay_field_from_string(c.field);
  if (!field) config_error("unknown decay field '" + c.field + "'");
  const DecayReport d = decay_fit(spec, *field, parse_radii(c.radii.empty() ? "10:100:8" : c.radii), {}, c.threads);
  for (std::size_t i = 0; i < d.radii.size(); ++i)
    rep.results.push_back(Json{{"field", d.field_name}, {"r", num(d.radii[i])}, {"norm", num(d.norms[i])}});
  Json fit{{"field", d.field_name},
           {"fitted_exponent", num(d.fitted_exponent)},
           {"fit_residual", num(d.fit_residual)},
           {"upper_half_exponent", num(d.upper_half_exponent)}};
  rep.results.push_back(fit);
  if (c.expect) {
    const double dev = std::abs(d.fitted_exponent - *c.expect);
    rep.residual(dev);
    rep.pass = dev <= tol_or(c, 0.1);
  }
}

inline CurveSpec make_curve(const RunConfig& c, const MetricSpec& spec) {
  CurveSpec curve{spec, MassFamily{}};
  curve.h_s = c.fd_step;
  if (c.family == "mass") return curve;
  if (c.family == "gauge") curve.family = default_gauge_flow(spec);
  else if (c.family == "conformal-bump") curve.family = default_conformal_bump(spec);
  else config_error("family must be mass, gauge or conformal-bump, got '" + c.family + "'");
  return curve;
}

inline void run_boundary(const RunConfig& c, const MetricSpec& spec, Report& rep) {
  BoundaryOptions opt;
  opt.resolution = c.resolution;
  opt.threads = c.threads;
  const BoundaryReport b =
      boundary_integral_estimate(make_curve(c, spec), parse_radii(c.radii.empty() ? "10:60:6" : c.radii), opt);
  for (const auto& s : b.samples)
    rep.results.push_back(Json{{"r", num(s.r)},
                               {"integrand_norm", num(s.integrand_norm)},
                               {"literal_norm", num(s.literal_norm)},
                               {"surface_estimate", num(s.surface_estimate)},
                               {"literal_surface", num(s.literal_surface)}});
  rep.results.push_back(
      Json{{"integrand_exponent", num(b.integrand_exponent)}, {"surface_exponent", num(b.surface_exponent)}});
  // the surface term must decay at least like 1/r, up to the declared slack
  rep.pass = b.surface_exponent <= -1.0 + tol_or(c, 0.2);
}

inline void run_perturb(const RunConfig& c, const MetricSpec& spec, Report& rep) {
  const double tol = tol_or(c, 1e-5);
  const CurveSpec curve = make_curve(c, spec);
  std::vector<Point> pts = c.grid.empty() ? std::vector<Point>{reference_point(spec.base)} : grid_points(spec, c.grid);
  if (!c.quantity.empty()) {
    const auto q = quantity_from_string(c.quantity);
    if (!q) config_error("unknown quantity '" + c.quantity + "'");
    for (const Point& p : pts) {
      const DeltaFields d = delta_fields(curve, *q, p);
      rep.results.push_back(Json{{"check", "delta"},
                                 {"quantity", c.quantity},
                                 {"point", point_json(p)},
                                 {"value", array_json(d.value)},
                                 {"delta", array_json(d.delta)},
                                 {"delta2", array_json(d.delta2)},
                                 {"truncation", num(d.truncation)},
                                 {"truncation2", num(d.truncation2)},
                                 {"richardson_order", num(d.richardson_order)}});
    }
  }
  const ClosedReport cl = check_order1_closed(curve, pts, 2e-3, c.threads);
  rep.results.push_back(Json{{"check", "hypothesis"},
                             {"max_E", num(cl.hypothesis.max_E)},
                             {"max_delta_E", num(cl.hypothesis.max_delta_E)},
                             {"tolerance", num(cl.hypothesis.tolerance)}});
  rep.results.push_back(Json{{"check", "order1_closed"}, {"max_norm", num(cl.max_norm)}});
  const AExpansionReport a = check_A_expansion(curve, pts, true, c.threads);
  rep.results.push_back(Json{{"check", "A_expansion"},
                             {"max_A0", num(a.max_A0)},
                             {"max_dA", num(a.max_dA)},
                             {"max_summand", num(a.max_summand)},
                             {"max_residual", num(a.max_residual)},
                             {"max_residual_half", num(a.max_residual_half)},
                             {"observed_order", num(a.observed_order)}});
  const ParallelJReport pj = check_second_order_parallel(curve, pts, 1e-8, c.threads);
  rep.results.push_back(Json{{"check", "J_parallel"},
                             {"s", array_json(pj.s_values)},
                             {"norms", array_json(pj.norms)},
                             {"exponent", num(pj.exponent)},
                             {"below_tolerance", pj.below_tolerance}});
  rep.residual(cl.max_norm);
  rep.pass = cl.max_norm <= tol && a.max_residual <= tol && (pj.below_tolerance || pj.exponent >= 1.7);
}

inline void run_list_catalog(Report& rep) {
  for (CatalogId id : {CatalogId::Flat, CatalogId::EuclideanSchwarzschild, CatalogId::TaubNUT, CatalogId::EguchiHanson,
                       CatalogId::Sphere4, CatalogId::ProductS2xS2}) {
    const ChartInfo& info = chart_info(id);
    Json coords = Json::array(), params = Json::array();
    for (auto n : info.coord_names) coords.push_back(std::string(n));
    for (std::size_t i = 0; i < info.param_names.size(); ++i)
      params.push_back(Json{{"name", std::string(info.param_names[i])}, {"default", info.default_params[i]}});
    rep.results.push_back(Json{{"metric", std::string(to_string(id))},
                               {"coordinates", coords},
                               {"params", params},
                               {"radial_index", info.radial_index},
                               {"half_flat_orientation", info.half_flat_orientation},
                               {"note", std::string(info.note)}});
  }
  rep.results.push_back(Json{{"metric", "AsymmetricBump"}, {"note", "flat chart plus an anisotropic bump deformation"}});
  rep.results.push_back(Json{{"metric", "ConformalBump"}, {"note", "conformal bump over Flat (W+ = 0)"}});
}

// Executes the configured subcommand; never throws.
inline Report execute(const RunConfig& c) {
  Report rep;
  rep.config_echo = config_echo(c);
  try {
    validate(c);
    if (c.subcommand == "list-catalog") {
      run_list_catalog(rep);
      return rep;
    }
    const MetricSpec spec = make_metric(c);
    if (c.subcommand == "verify-identity") run_verify_identity(c, spec, rep);
    else if (c.subcommand == "weitzenbock") run_weitzenbock(c, spec, rep);
    else if (c.subcommand == "conformal-check") run_conformal_check(c, spec, rep);
    else if (c.subcommand == "detect-kahler") run_detect_kahler(c, spec, rep);
    else if (c.subcommand == "norms") run_norms(c, spec, rep);
    else if (c.subcommand == "decay-fit") run_decay_fit(c, spec, rep);
    else if (c.subcommand == "boundary") run_boundary(c, spec, rep);
    else if (c.subcommand == "perturb") run_perturb(c, spec, rep);
  } catch (const GeometryError& e) {
    rep.results.clear();
    rep.failure = Failure{std::string(to_string(e.code())), e.what()};
  } catch (const std::exception& e) {
    rep.results.clear();
    rep.failure = Failure{"InternalError", e.what()};
  }
  return rep;
}

// Serializes to c.out (stdout when empty) and returns the exit code.
inline int run(const RunConfig& c, std::ostream& stdout_stream = std::cout) {
  const Report rep = execute(c);
  const std::string text = serialize(rep, c.format);
  if (c.out.empty()) {
    stdout_stream << text;
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) {
      std::cerr << "cannot write " << c.out << "\n";
      return kExitPrecondition;
    }
    f << text;
  }
  return exit_code(rep);
}

}  // namespace sdw::cli

#endif  // SDW_CLI_RUN_HPP
