#ifndef SDW_PERTURBATION_HPP
#define SDW_PERTURBATION_HPP

// Derivatives along one-parameter metric families and the expansions of the
// rescaled divergence identity around a Kaehler background.

#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "sdw/kahler.hpp"

namespace sdw {

enum class Quantity { Metric, E, Fhat, Omega, Ahat, Bhat, NablaFhat, J };

constexpr std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::Metric: return "metric";
    case Quantity::E: return "E";
    case Quantity::Fhat: return "Fhat";
    case Quantity::Omega: return "Omega";
    case Quantity::Ahat: return "Ahat";
    case Quantity::Bhat: return "Bhat";
    case Quantity::NablaFhat: return "nablaFhat";
    case Quantity::J: return "J";
  }
  return "unknown";
}

inline std::optional<Quantity> quantity_from_string(std::string_view s) {
  for (Quantity q : {Quantity::Metric, Quantity::E, Quantity::Fhat, Quantity::Omega, Quantity::Ahat, Quantity::Bhat,
                     Quantity::NablaFhat, Quantity::J})
    if (to_string(q) == s) return q;
  return std::nullopt;
}

// Reference eigenform at s = 0 for sign alignment along the curve.
struct SignReference {
  Mat4 f;
  Mat4 ginv;
};

inline double align_sign(const Mat4& f, const SignReference& ref) {
  return inner(f, ref.f, ref.ginv) < 0.0 ? -1.0 : 1.0;
}

inline SignReference sign_reference(const CurveSpec& curve, const Point& p) {
  const MetricSpec hat = kahler_wrap(curve.base);
  const SDWeylSystem s = weyl_plus_system(curvature_pack(hat, p, false), curve.base.orientation);
  require_simple_top(s);
  return {s.eigenforms[2], s.ginv};
}

template <int R>
std::vector<double> flatten(const DTensor<R>& t) {
  return std::vector<double>(t.c.begin(), t.c.end());
}

// The selected field of the curve member at s, components flattened.
inline std::vector<double> curve_quantity(const CurveSpec& curve, double s, const Point& p, Quantity q,
                                          const SignReference& ref) {
  const MetricSpec member = curve_member(curve, s);
  const int o = curve.base.orientation;
  switch (q) {
    case Quantity::Metric: return flatten(metric_value(member, p));
    case Quantity::E: return flatten(curvature_pack(member, p, false).trace_free_ricci);
    case Quantity::Omega: return {std::cbrt(lambda3_at(member, p))};
    case Quantity::Bhat: return {term_B_analytic(kahler_wrap(member), p)};
    default: break;
  }
  const MetricSpec hat = kahler_wrap(member);
  if (q == Quantity::Fhat || q == Quantity::J) {
    const SDWeylSystem sys = weyl_plus_system(curvature_pack(hat, p, false), o);
    require_simple_top(sys);
    const Mat4 f = sys.eigenforms[2] * align_sign(sys.eigenforms[2], ref);
    if (q == Quantity::Fhat) return flatten(f);
    Mat4 j;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double acc = 0.0;
        for (int c = 0; c < 4; ++c) acc += f(b, c) * sys.ginv(c, a);
        j(a, b) = std::sqrt(2.0) * acc;
      }
    return flatten(j);
  }
  const PointGeometry g = point_geometry(hat, p);
  const SpectralGradient sg = spectral_gradient(g);
  if (q == Quantity::NablaFhat) return flatten(sg.nablaF * align_sign(g.system.eigenforms[2], ref));
  return {term_A(sg, g.system, current_and_V(sg, g.system))};
}

struct DeltaFields {
  std::vector<double> value;   // T(0)
  std::vector<double> delta;   // dT/ds at 0
  std::vector<double> delta2;  // d^2T/ds^2 at 0
  std::vector<double> stencil; // s values used at the finest level
  double truncation = 0.0;     // error estimate of delta
  double truncation2 = 0.0;    // error estimate of delta2
  double richardson_order = std::numeric_limits<double>::quiet_NaN();
};

// 5-point central differences of T on s in {-2h, -h, 0, h, 2h}.
struct FivePoint {
  std::vector<double> d1, d2;
};

inline FivePoint five_point(const std::vector<double>& t0, const std::vector<double>& tp1,
                            const std::vector<double>& tm1, const std::vector<double>& tp2,
                            const std::vector<double>& tm2, double h) {
  FivePoint r;
  r.d1.resize(t0.size());
  r.d2.resize(t0.size());
  for (std::size_t k = 0; k < t0.size(); ++k) {
    // differences from t0 keep the stencil exactly zero on a constant curve
    const double p1 = tp1[k] - t0[k], m1 = tm1[k] - t0[k], p2 = tp2[k] - t0[k], m2 = tm2[k] - t0[k];
    r.d1[k] = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
    r.d2[k] = (16.0 * (p1 + m1) - (p2 + m2)) / (12.0 * h * h);
  }
  return r;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

// delta and delta2 on three nested levels h, 2h, 4h; the reported values come
// from level h and the order from the successive level differences.
inline DeltaFields delta_fields(const CurveSpec& curve, Quantity q, const Point& p, std::optional<double> step = {}) {
  const double h = step.value_or(curve.h_s);
  const bool aligned = q == Quantity::Fhat || q == Quantity::J || q == Quantity::NablaFhat;
  const SignReference ref = aligned ? sign_reference(curve, p) : SignReference{identity4(), identity4()};
  auto at = [&](double s) { return curve_quantity(curve, s, p, q, ref); };
  DeltaFields d;
  d.value = at(0.0);
  std::array<std::vector<double>, 4> plus, minus;  // s = +-h, +-2h, +-4h, +-8h
  for (int k = 0; k < 4; ++k) {
    const double s = h * static_cast<double>(1 << k);
    plus[k] = at(s);
    minus[k] = at(-s);
  }
  std::array<FivePoint, 3> lv;
  for (int k = 0; k < 3; ++k)
    lv[k] = five_point(d.value, plus[k], minus[k], plus[k + 1], minus[k + 1], h * static_cast<double>(1 << k));
  d.delta = lv[0].d1;
  d.delta2 = lv[0].d2;
  d.stencil = {-2.0 * h, -h, 0.0, h, 2.0 * h};
  const double e01 = max_abs_diff(lv[0].d1, lv[1].d1);
  const double e12 = max_abs_diff(lv[1].d1, lv[2].d1);
  const double e01_2 = max_abs_diff(lv[0].d2, lv[1].d2);
  // level difference plus a rounding floor that grows like 1/h
  const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * max_abs(d.value);
  d.truncation = 4.0 * e01 + rounding / h;
  d.truncation2 = 4.0 * e01_2 + rounding / (h * h);
  d.richardson_order = richardson_order(e12, e01);
  return d;
}

// ------------------------------------------------------ standard curves

// Compactly supported gauge flow around the chart reference point; widths are
// 0.3 coordinate scales, at least 0.6.
inline GaugeFlow default_gauge_flow(const MetricSpec& spec) {
  const Point c = reference_point(spec.base);
  const Point sc = coordinate_scales(spec, c);
  GaugeFlow f;
  f.xi.bump.center = c;
  for (int v = 0; v < 4; ++v) f.xi.bump.widths[v] = std::max(0.6, 0.3 * sc[v]);
  f.xi.v = {0.2, 0.3, -0.1, 0.25};
  f.xi.linear(0, 1) = 0.1;
  f.xi.linear(2, 3) = -0.2;
  return f;
}

// Conformal bump around the chart reference point.
inline ConformalBumpFamily default_conformal_bump(const MetricSpec& spec) {
  const Point c = reference_point(spec.base);
  const Point sc = coordinate_scales(spec, c);
  ConformalBumpFamily f;
  f.bump.center = c;
  for (int v = 0; v < 4; ++v) f.bump.widths[v] = sc[v];
  return f;
}

// ------------------------------------------------------ difference tensor

struct DifferenceTensor {
  DTensor<3> c;               // C(a, b, c) = C_ab^c
  double symmetry_defect = 0.0;  // max |C_ab^c - C_ba^c|
  double consistency = 0.0;      // max |nabla^(s) u - nabla u + C u| over test covectors
  double scale = 0.0;            // max |nabla u| over test covectors
};

// C_ab^c = 1/2 gs^{cd} (nabla_a gs_bd + nabla_b gs_ad - nabla_d gs_ab), with
// nabla the Levi-Civita connection of g0, evaluated on gs - g0 so that equal
// metrics give C = 0 exactly; checked against Gamma(gs) - Gamma(g0)
// acting on analytic covectors.
inline DifferenceTensor difference_tensor(const MetricSpec& gs_spec, const MetricSpec& g0_spec, const Point& p) {
  const TField<1, 2> gs = metric_field<1>(gs_spec, p);
  const TField<1, 2> g0 = metric_field<1>(g0_spec, p);
  const TField<0, 3> gam0 = christoffel(g0, inverse_field(g0));
  const TField<0, 3> gams = christoffel(gs, inverse_field(gs));
  const DTensor<3> ngs = values(covariant_derivative(gs - g0, gam0));  // (e, a, b) = nabla_e gs_ab
  const Mat4 gsinv = inverse_field(values(gs));
  DifferenceTensor d;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        double acc = 0.0;
        for (int e = 0; e < 4; ++e) acc += gsinv(c, e) * (ngs(a, b, e) + ngs(b, a, e) - ngs(e, a, b));
        d.c(a, b, c) = 0.5 * acc;
      }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) d.symmetry_defect = std::max(d.symmetry_defect, std::abs(d.c(a, b, c) - d.c(b, a, c)));
  const auto x = coordinate_jet<1>(p);
  for (int trial = 0; trial < 3; ++trial) {
    TField<1, 1> u;
    for (int b = 0; b < 4; ++b) {
      u(b) = Taylor<1>(0.3 * (b + 1) - 0.2 * trial);
      for (int v = 0; v < 4; ++v) u(b) += (x[v] - p[v]) * (0.1 * ((b + 2 * v + trial) % 5) - 0.2);
    }
    const DTensor<2> ns = values(covariant_derivative(u, gams));
    const DTensor<2> n0 = values(covariant_derivative(u, gam0));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double cu = 0.0;
        for (int c = 0; c < 4; ++c) cu += d.c(a, b, c) * u(c).value();
        d.consistency = std::max(d.consistency, std::abs(ns(a, b) - n0(a, b) + cu));
        d.scale = std::max({d.scale, std::abs(ns(a, b)), std::abs(n0(a, b))});
      }
  }
  return d;
}

inline DifferenceTensor difference_tensor(const CurveSpec& curve, double s, const Point& p) {
  return difference_tensor(kahler_wrap(curve_member(curve, s)), kahler_wrap(curve.base), p);
}

// ------------------------------------------------------ hypothesis gate

struct HypothesisReport {
  double max_E = 0.0;       // max |E(0)|
  double max_delta_E = 0.0;  // max |dE/ds|
  double tolerance = 0.0;
  bool admissible = false;
};

inline constexpr double kHypothesisRel = 1e-6;
inline constexpr double kHypothesisAbs = 1e-10;

// The background must be Einstein and the curve an infinitesimal Einstein
// deformation: E(0) = 0 and dE/ds = 0 at every sample point.
inline HypothesisReport einstein_deformation_report(const CurveSpec& curve, const std::vector<Point>& points) {
  HypothesisReport r;
  double tol = kHypothesisAbs;
  for (const Point& p : points) {
    const CurvaturePack pack = curvature_pack(curve.base, p, false);
    tol = std::max(tol, kHypothesisRel * riemann_norm(pack) + kHypothesisAbs);
    const DeltaFields e = delta_fields(curve, Quantity::E, p);
    r.max_E = std::max(r.max_E, max_abs(e.value));
    r.max_delta_E = std::max(r.max_delta_E, max_abs(e.delta));
  }
  r.tolerance = tol;
  r.admissible = r.max_E <= tol && r.max_delta_E <= tol;
  return r;
}

inline HypothesisReport require_einstein_deformation(const CurveSpec& curve, const std::vector<Point>& points) {
  HypothesisReport r = einstein_deformation_report(curve, points);
  if (!r.admissible)
    fail(ErrorCode::HypothesisViolated, "curve is not an infinitesimal Einstein deformation (|E|=" +
                                            std::to_string(r.max_E) + ", |dE|=" + std::to_string(r.max_delta_E) + ")");
  return r;
}

// ------------------------------------------------------ d(delta Fhat) = 0

struct ClosedRow {
  Point point{};
  double norm = 0.0;        // |d(delta Fhat)| in ghat(0)
  double delta_norm = 0.0;  // |delta Fhat| in ghat(0)
};

struct ClosedReport {
  HypothesisReport hypothesis;
  std::vector<ClosedRow> rows;
  double max_norm = 0.0;
};

// dFhat/ds at p by the 5-point stencil, sign-aligned with `ref`.
inline Mat4 delta_Fhat(const CurveSpec& curve, const Point& p, const SignReference& ref, double h) {
  auto at = [&](double s) {
    const std::vector<double> v = curve_quantity(curve, s, p, Quantity::Fhat, ref);
    Mat4 m;
    std::copy(v.begin(), v.end(), m.c.begin());
    return m;
  };
  return (at(-2.0 * h) - at(2.0 * h) + 8.0 * (at(h) - at(-h))) * (1.0 / (12.0 * h));
}

inline ClosedReport check_order1_closed(const CurveSpec& curve, const std::vector<Point>& points,
                                        double spatial_factor = 2e-3, int threads = 0) {
  ClosedReport rep;
  rep.hypothesis = require_einstein_deformation(curve, points);
  const MetricSpec hat0 = kahler_wrap(curve.base);
  rep.rows = parallel_map<ClosedRow>(
      points.size(),
      [&](std::size_t i) {
        const Point& p = points[i];
        const SignReference ref = sign_reference(curve, p);
        const Point hx = fd_steps(curve.base, p, spatial_factor);
        // 4th-order central partials of delta Fhat along each axis
        std::array<Mat4, 4> dpart;
        for (int v = 0; v < 4; ++v) {
          std::array<Mat4, 4> vals;  // offsets -2, -1, +1, +2
          const int offs[4] = {-2, -1, 1, 2};
          for (int k = 0; k < 4; ++k) {
            Point q = p;
            q[v] += offs[k] * hx[v];
            require_stencil_in_chart(curve.base, q);
            SignReference rq = sign_reference(curve, q);
            rq.f = rq.f * align_sign(rq.f, ref);
            vals[k] = delta_Fhat(curve, q, rq, curve.h_s);
          }
          dpart[v] = (vals[0] - vals[3] + 8.0 * (vals[2] - vals[1])) * (1.0 / (12.0 * hx[v]));
        }
        DTensor<3> d;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) d(a, b, c) = dpart[a](b, c) + dpart[b](c, a) + dpart[c](a, b);
        const Mat4 ginv = inverse_field(metric_value(hat0, p));
        ClosedRow row;
        row.point = p;
        row.norm = norm(d, ginv);
        row.delta_norm = norm(delta_Fhat(curve, p, ref, curve.h_s), ginv);
        return row;
      },
      threads);
  for (const auto& r : rep.rows) rep.max_norm = std::max(rep.max_norm, r.norm);
  return rep;
}

// ------------------------------------------------------ A expansion

// The pieces of A at one curve member, all vanishing on the Kaehler background.
struct ASample {
  double A = 0.0;
  double nablaF_sq = 0.0;   // |nabla Fhat|^2
  double j_sq = 0.0;        // |j|^2
  double gap_sq = 0.0;      // (lambda1 - lambda2)^2
  double gamma_sq = 0.0;    // |Gamma^3_1|^2 + |Gamma^3_2|^2
  double lambda3 = 0.0;
};

inline ASample a_sample(const CurveSpec& curve, double s, const Point& p) {
  const PointGeometry g = point_geometry(kahler_wrap(curve_member(curve, s)), p);
  const SpectralGradient sg = spectral_gradient(g);
  const CurrentAndV jv = current_and_V(sg, g.system);
  const Mat4& gi = g.system.ginv;
  ASample r;
  r.A = term_A(sg, g.system, jv);
  r.nablaF_sq = inner(sg.nablaF, sg.nablaF, gi);
  r.j_sq = inner(jv.j, jv.j, gi);
  const double d = g.system.lambdas[0] - g.system.lambdas[1];
  r.gap_sq = d * d;
  r.gamma_sq = inner(sg.gamma31, sg.gamma31, gi) + inner(sg.gamma32, sg.gamma32, gi);
  r.lambda3 = g.system.lambdas[2];
  return r;
}

struct AExpansionRow {
  Point point{};
  double A0 = 0.0, dA = 0.0, d2A = 0.0;
  // summands of the second-order expansion
  double s_nablaF = 0.0;  // |delta nabla Fhat|^2 / 12
  double s_j = 0.0;       // |delta j|^2
  double s_gap = 0.0;     // (delta lambda1 - delta lambda2)^2 / (3 lambda3)
  double s_gamma = 0.0;   // (|delta Gamma^3_1|^2 + |delta Gamma^3_2|^2) / 3
  double summand_sum = 0.0;
  double residual = 0.0;       // |d2A - 2 summand_sum| at step h
  double residual_half = 0.0;  // same at step h/2
  double scale = 0.0;
};

struct AExpansionReport {
  std::optional<HypothesisReport> hypothesis;  // empty when run ungated
  std::vector<AExpansionRow> rows;
  double max_A0 = 0.0, max_dA = 0.0, max_summand = 0.0;
  double max_residual = 0.0, max_residual_half = 0.0, max_relative_residual = 0.0;
  double observed_order = std::numeric_limits<double>::quiet_NaN();
};

struct ASecondOrder {
  double A0, dA, d2A, s_nablaF, s_j, s_gap, s_gamma;
};

// d2A by the 5-point stencil; |delta X|^2 for X vanishing at s = 0 by the even
// average (|X(h)|^2 + |X(-h)|^2) / (2 h^2), which is gauge invariant in the
// eigenform basis.
inline ASecondOrder a_second_order(const CurveSpec& curve, const Point& p, double h) {
  const ASample s0 = a_sample(curve, 0.0, p);
  const ASample sp = a_sample(curve, h, p), sm = a_sample(curve, -h, p);
  const ASample sp2 = a_sample(curve, 2.0 * h, p), sm2 = a_sample(curve, -2.0 * h, p);
  ASecondOrder r;
  r.A0 = s0.A;
  r.dA = (-sp2.A + 8.0 * sp.A - 8.0 * sm.A + sm2.A) / (12.0 * h);
  r.d2A = (-sp2.A + 16.0 * sp.A - 30.0 * s0.A + 16.0 * sm.A - sm2.A) / (12.0 * h * h);
  const double w = 1.0 / (2.0 * h * h);
  r.s_nablaF = w * (sp.nablaF_sq + sm.nablaF_sq) / 12.0;
  r.s_j = w * (sp.j_sq + sm.j_sq);
  r.s_gap = w * (sp.gap_sq + sm.gap_sq) / (3.0 * s0.lambda3);
  r.s_gamma = w * (sp.gamma_sq + sm.gamma_sq) / 3.0;
  return r;
}

inline AExpansionReport check_A_expansion(const CurveSpec& curve, const std::vector<Point>& points, bool gated = true,
                                          int threads = 0) {
  AExpansionReport rep;
  if (gated) rep.hypothesis = require_einstein_deformation(curve, points);
  const double h = curve.h_s;
  rep.rows = parallel_map<AExpansionRow>(
      points.size(),
      [&](std::size_t i) {
        const ASecondOrder a = a_second_order(curve, points[i], h);
        const ASecondOrder b = a_second_order(curve, points[i], 0.5 * h);
        AExpansionRow r;
        r.point = points[i];
        r.A0 = a.A0;
        r.dA = a.dA;
        r.d2A = a.d2A;
        r.s_nablaF = a.s_nablaF;
        r.s_j = a.s_j;
        r.s_gap = a.s_gap;
        r.s_gamma = a.s_gamma;
        r.summand_sum = a.s_nablaF + a.s_j + a.s_gap + a.s_gamma;
        r.residual = std::abs(a.d2A - 2.0 * r.summand_sum);
        r.residual_half = std::abs(b.d2A - 2.0 * (b.s_nablaF + b.s_j + b.s_gap + b.s_gamma));
        r.scale = std::max(std::abs(a.d2A), 2.0 * r.summand_sum);
        return r;
      },
      threads);
  for (const auto& r : rep.rows) {
    rep.max_A0 = std::max(rep.max_A0, std::abs(r.A0));
    rep.max_dA = std::max(rep.max_dA, std::abs(r.dA));
    rep.max_summand = std::max({rep.max_summand, r.s_nablaF, r.s_j, r.s_gap, r.s_gamma});
    rep.max_residual = std::max(rep.max_residual, r.residual);
    rep.max_residual_half = std::max(rep.max_residual_half, r.residual_half);
    if (r.scale > 0.0) rep.max_relative_residual = std::max(rep.max_relative_residual, r.residual / r.scale);
  }
  rep.observed_order = richardson_order(rep.max_residual, rep.max_residual_half);
  return rep;
}

// ------------------------------------------------------ parallelism of J

struct ParallelJReport {
  HypothesisReport hypothesis;
  std::vector<double> s_values;  // 4h, 2h, h
  std::vector<double> norms;     // max over points of |nabla^(s) J(s)|
  double exponent = std::numeric_limits<double>::quiet_NaN();
  bool below_tolerance = false;
  double tolerance = 1e-8;
};

// |nabla J| = sqrt(2) |nabla Fhat| in ghat(s), since nabla ghat = 0.
inline double nabla_J_norm(const CurveSpec& curve, double s, const Point& p) {
  const PointGeometry g = point_geometry(kahler_wrap(curve_member(curve, s)), p);
  const SpectralGradient sg = spectral_gradient(g);
  return std::sqrt(2.0) * norm(sg.nablaF, g.system.ginv);
}

// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : (n * sxy - sx * sy) / den;
}

inline ParallelJReport check_second_order_parallel(const CurveSpec& curve, const std::vector<Point>& points,
                                                   double tolerance = 1e-8, int threads = 0) {
  ParallelJReport rep;
  rep.tolerance = tolerance;
  rep.hypothesis = require_einstein_deformation(curve, points);
  const double h = curve.h_s;
  rep.s_values = {4.0 * h, 2.0 * h, h};
  bool all_positive = true;
  for (double s : rep.s_values) {
    const auto vals =
        parallel_map<double>(points.size(), [&](std::size_t i) { return nabla_J_norm(curve, s, points[i]); }, threads);
    double m = 0.0;
    for (double v : vals) m = std::max(m, v);
    rep.norms.push_back(m);
    all_positive = all_positive && m > 0.0;
  }
  rep.below_tolerance = *std::max_element(rep.norms.begin(), rep.norms.end()) < tolerance;
  if (all_positive) rep.exponent = loglog_slope(rep.s_values, rep.norms);
  return rep;
}

// ------------------------------------------------------ the tensor Phat

// Phat_abcd = Fhat_ab Fhat_cd - (ghat_ac ghat_bd - ghat_ad ghat_bc + epshat_abcd) / 6,
// all indices lowered with ghat.
inline DTensor<4> phat_lower(const Mat4& f, const Mat4& g, int orientation) {
  const DTensor<4> eps = volume_form(g, orientation);
  DTensor<4> p;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d)
          p(a, b, c, d) = f(a, b) * f(c, d) - (g(a, c) * g(b, d) - g(a, d) * g(b, c) + eps(a, b, c, d)) / 6.0;
  return p;
}

// Phat of the Kaehler rescaling of `spec` at p.
inline DTensor<4> phat_at(const MetricSpec& spec, const Point& p) {
  const MetricSpec hat = kahler_wrap(spec);
  const CurvaturePack pack = curvature_pack(hat, p, false);
  const SDWeylSystem s = weyl_plus_system(pack, spec.orientation);
  require_simple_top(s);
  return phat_lower(s.eigenforms[2], pack.g, spec.orientation);
}

struct PhatParallelDefect {
  double defect = 0.0;  // |nablahat Phat| in ghat
  double scale = 0.0;   // |Phat| times |Riem|^{1/2}, both in ghat
};

// nablahat Phat by 4th-order central differences of Phat plus Christoffel terms. Phat is
// quadratic in Fhat, so no sign alignment is needed.
inline PhatParallelDefect phat_parallel_defect(const MetricSpec& spec, const Point& p, double factor = 1e-3) {
  const MetricSpec hat = kahler_wrap(spec);
  const TField<1, 2> g = metric_field<1>(hat, p);
  const Mat4 ginv = inverse_field(values(g));
  const TField<0, 3> gam = christoffel(g, inverse_field(g));
  const DTensor<4> p0 = phat_at(spec, p);
  const Point h = fd_steps(spec, p, factor);
  std::array<DTensor<4>, 4> dp;
  for (int e = 0; e < 4; ++e) {
    std::array<DTensor<4>, 4> v;  // offsets -2, -1, +1, +2
    const int offs[4] = {-2, -1, 1, 2};
    for (int k = 0; k < 4; ++k) {
      Point q = p;
      q[e] += offs[k] * h[e];
      require_stencil_in_chart(spec, q);
      v[k] = phat_at(spec, q);
    }
    dp[e] = (v[0] - v[3] + 8.0 * (v[2] - v[1])) * (1.0 / (12.0 * h[e]));
  }
  DTensor<5> n;
  for (int e = 0; e < 4; ++e)
    for (int k = 0; k < 256; ++k) {
      const auto idx = DTensor<4>::unflat(k);
      double v = dp[e].c[k];
      for (int slot = 0; slot < 4; ++slot)
        for (int q = 0; q < 4; ++q) {
          auto j = idx;
          j[slot] = q;
          v -= gam(q, e, idx[slot]).value() * p0(j[0], j[1], j[2], j[3]);
        }
      n.c[e * 256 + k] = v;
    }
  PhatParallelDefect r;
  r.defect = norm(n, ginv);
  r.scale = norm(p0, ginv) * std::sqrt(riemann_norm(curvature_pack(hat, p, false)));
  return r;
}

}  // namespace sdw

#endif  // SDW_PERTURBATION_HPP
