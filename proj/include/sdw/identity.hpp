#ifndef SDW_IDENTITY_HPP
#define SDW_IDENTITY_HPP

// Spectral first derivatives of the top self-dual Weyl eigenform, the current
// j, the vector V, the A and B terms, and certification of
// div V = A + B by central differencing of gauge-invariant fields.

#include <cmath>
#include <limits>
#include <vector>

#include "sdw/curvature.hpp"
#include "sdw/forms.hpp"
#include "sdw/parallel.hpp"
#include "sdw/selfdual.hpp"
#include "sdw/weitzenbock.hpp"

namespace sdw {

// Everything first-order at one point: curvature with nabla W, the self-dual
// system, and nabla W+.
struct PointGeometry {
  Point point{};
  int orientation = 1;
  CurvaturePack pack;
  SDWeylSystem system;
  DTensor<4> eps;         // eps_abcd
  DTensor<5> nabla_wplus;  // (e, a, b, c, d) = nabla_e W+_abcd
  double sqrt_det = 0.0;
};

inline PointGeometry point_geometry(const MetricSpec& spec, const Point& p) {
  PointGeometry g;
  g.point = p;
  g.orientation = spec.orientation;
  g.pack = curvature_pack(spec, p, true);
  g.system = weyl_plus_system(g.pack, spec.orientation);
  g.eps = volume_form(g.pack.g, spec.orientation);
  g.sqrt_det = std::sqrt(det4(g.pack.g));
  const DTensor<4> eps_up = raise_last_pair(g.eps, g.pack.ginv);
  const DTensor<5>& nw = *g.pack.nabla_weyl;
  for (int e = 0; e < 4; ++e) {
    DTensor<4> slice;
    for (int k = 0; k < 256; ++k) slice.c[k] = nw.c[e * 256 + k];
    const DTensor<4> sd = self_dual_part(slice, eps_up);
    for (int k = 0; k < 256; ++k) g.nabla_wplus.c[e * 256 + k] = sd.c[k];
  }
  return g;
}

inline DTensor<4> slice5(const DTensor<5>& t, int e) {
  DTensor<4> s;
  for (int k = 0; k < 256; ++k) s.c[k] = t.c[e * 256 + k];
  return s;
}

inline void require_nonzero_lambda3(const PointGeometry& g) {
  if (!(g.system.lambdas[2] > kLambdaZeroRel * riemann_norm(g.pack)))
    fail(ErrorCode::ZeroLambda3, "top self-dual Weyl eigenvalue vanishes");
}

struct SpectralGradient {
  Vec4 dlambda3;    // nabla_a lambda3
  Vec4 gamma31;     // Gamma_a^3_1
  Vec4 gamma32;     // Gamma_a^3_2
  DTensor<3> nablaF;  // (a, b, c) = nabla_a F_bc for F = F^3
};

// Connection coefficient Gamma_a^i_j = <F^j, (nabla_a W+) F^i> / (4 (lambda_i - lambda_j)).
inline Vec4 connection_coefficient(const PointGeometry& g, int i, int j) {
  const auto& s = g.system;
  Vec4 r;
  for (int a = 0; a < 4; ++a) {
    const Mat4 wf = apply_pair_operator(slice5(g.nabla_wplus, a), s.eigenforms[i], s.ginv);
    r(a) = inner(s.eigenforms[j], wf, s.ginv) / (4.0 * (s.lambdas[i] - s.lambdas[j]));
  }
  return r;
}

inline SpectralGradient spectral_gradient(const PointGeometry& g) {
  const auto& s = g.system;
  require_simple_top(s);
  SpectralGradient sg;
  const Mat4& f3 = s.eigenforms[2];
  for (int a = 0; a < 4; ++a) {
    const Mat4 wf = apply_pair_operator(slice5(g.nabla_wplus, a), f3, s.ginv);
    sg.dlambda3(a) = 0.25 * inner(f3, wf, s.ginv);
    sg.gamma31(a) = inner(s.eigenforms[0], wf, s.ginv) / (4.0 * (s.lambdas[2] - s.lambdas[0]));
    sg.gamma32(a) = inner(s.eigenforms[1], wf, s.ginv) / (4.0 * (s.lambdas[2] - s.lambdas[1]));
  }
  for (int a = 0; a < 4; ++a)
    for (int k = 0; k < 16; ++k)
      sg.nablaF.c[a * 16 + k] = sg.gamma31(a) * s.eigenforms[0].c[k] + sg.gamma32(a) * s.eigenforms[1].c[k];
  return sg;
}

struct CurrentAndV {
  Vec4 j;  // j_a = g^{bc} nabla_b F_ca (covariant)
  Vec4 V;  // V^a = F^{ab} j_b (contravariant)
};

inline CurrentAndV current_and_V(const DTensor<3>& nablaF, const Mat4& f, const Mat4& ginv) {
  CurrentAndV r;
  for (int a = 0; a < 4; ++a) {
    double s = 0.0;
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) s += ginv(b, c) * nablaF(b, c, a);
    r.j(a) = s;
  }
  const Mat4 fup = raise_all(f, ginv);
  for (int a = 0; a < 4; ++a) {
    double s = 0.0;
    for (int b = 0; b < 4; ++b) s += fup(a, b) * r.j(b);
    r.V(a) = s;
  }
  return r;
}

inline CurrentAndV current_and_V(const SpectralGradient& sg, const SDWeylSystem& s) {
  return current_and_V(sg.nablaF, s.eigenforms[2], s.ginv);
}

// A = |j|^2 + |nabla F|^2 / 12 + [(l1 - l2)^2 - 2 (l1 |G31|^2 + l2 |G32|^2)] / (3 l3)
inline double term_A(const SpectralGradient& sg, const SDWeylSystem& s, const CurrentAndV& jv) {
  const double l1 = s.lambdas[0], l2 = s.lambdas[1], l3 = s.lambdas[2];
  if (l3 == 0.0) fail(ErrorCode::ZeroLambda3, "A needs lambda3 != 0");
  const double jj = inner(jv.j, jv.j, s.ginv);
  const double nf = inner(sg.nablaF, sg.nablaF, s.ginv);
  const double g1 = inner(sg.gamma31, sg.gamma31, s.ginv);
  const double g2 = inner(sg.gamma32, sg.gamma32, s.ginv);
  return jj + nf / 12.0 + ((l1 - l2) * (l1 - l2) - 2.0 * (l1 * g1 + l2 * g2)) / (3.0 * l3);
}

// div V through the pointwise Weitzenboeck reduction |j|^2 - |nabla F|^2 / 4 + lambda3 - R / 6.
inline double divergence_spectral(const SpectralGradient& sg, const PointGeometry& g, const CurrentAndV& jv) {
  const auto& s = g.system;
  return inner(jv.j, jv.j, s.ginv) - 0.25 * inner(sg.nablaF, sg.nablaF, s.ginv) + s.lambdas[2] - g.pack.scalar / 6.0;
}

// Y = d*(lambda3^{-1} W+), Y_bcd = -g^{ef} nabla_f (W+_ebcd / lambda3).
inline DTensor<3> codifferential_scaled_weyl(const PointGeometry& g, const Vec4& dlambda3) {
  const auto& s = g.system;
  const double l3 = s.lambdas[2];
  DTensor<3> y;
  for (int b = 0; b < 4; ++b)
    for (int c = 0; c < 4; ++c)
      for (int d = 0; d < 4; ++d) {
        double acc = 0.0;
        for (int e = 0; e < 4; ++e)
          for (int f = 0; f < 4; ++f) {
            const double gi = s.ginv(e, f);
            if (gi == 0.0) continue;
            const double nz = g.nabla_wplus(f, e, b, c, d) / l3 - s.wplus(e, b, c, d) * dlambda3(f) / (l3 * l3);
            acc += gi * nz;
          }
        y(b, c, d) = -acc;
      }
  return y;
}

// -1/6 F^ab F^cd X_abcd
inline double contract_FF(const Mat4& f, const DTensor<4>& x, const Mat4& ginv, double factor) {
  const Mat4 fu = raise_all(f, ginv);
  double s = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (fu(a, b) == 0.0) continue;
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) s += fu(a, b) * fu(c, d) * x(a, b, c, d);
    }
  return factor * s;
}

// Gauge-invariant first-order fields sampled on a finite-difference stencil.
struct StencilSample {
  double sqrt_det = 0.0;
  Vec4 V;
  DTensor<3> Y;     // d*(lambda3^{-1} W+)
  DTensor<3> beta;  // F ^ *dF
};

// F ^ *dF with dF assembled from nabla F.
inline DTensor<3> wedge_F_star_dF(const DTensor<3>& nablaF, const Mat4& f, const DTensor<4>& eps, const Mat4& ginv) {
  DTensor<3> df;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) df(a, b, c) = nablaF(a, b, c) + nablaF(b, c, a) + nablaF(c, a, b);
  const DTensor<3> dfu = raise_all(df, ginv);
  Vec4 sdf;  // (*dF)_d = 1/6 dF^abc eps_abcd
  for (int d = 0; d < 4; ++d) {
    double s = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) s += dfu(a, b, c) * eps(a, b, c, d);
    sdf(d) = s / 6.0;
  }
  DTensor<3> w;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) w(a, b, c) = f(a, b) * sdf(c) + f(b, c) * sdf(a) + f(c, a) * sdf(b);
  return w;
}

// (*V)_bcd = V^a eps_abcd
inline DTensor<3> star_vector(const Vec4& v, const DTensor<4>& eps) {
  DTensor<3> r;
  for (int b = 0; b < 4; ++b)
    for (int c = 0; c < 4; ++c)
      for (int d = 0; d < 4; ++d) {
        double s = 0.0;
        for (int a = 0; a < 4; ++a) s += v(a) * eps(a, b, c, d);
        r(b, c, d) = s;
      }
  return r;
}

inline StencilSample stencil_sample(const PointGeometry& g) {
  require_nonzero_lambda3(g);
  const SpectralGradient sg = spectral_gradient(g);
  const CurrentAndV jv = current_and_V(sg, g.system);
  StencilSample s;
  s.sqrt_det = g.sqrt_det;
  s.V = jv.V;
  s.Y = codifferential_scaled_weyl(g, sg.dlambda3);
  s.beta = wedge_F_star_dF(sg.nablaF, g.system.eigenforms[2], g.eps, g.system.ginv);
  return s;
}

inline void require_stencil_in_chart(const MetricSpec& spec, const Point& q) {
  if (!in_chart(spec.base.id, spec.base.params, q))
    fail(ErrorCode::StencilOutsideChart, "finite-difference stencil leaves the chart domain");
}

struct StencilDerivatives {
  double divV = 0.0;
  double B = 0.0;
  double dbeta = 0.0;  // (d(F ^ *dF))_0123
};

// Central differences with per-axis steps h around the center geometry.
inline StencilDerivatives stencil_derivatives(const MetricSpec& spec, const PointGeometry& center,
                                              const StencilSample& c, const Point& h) {
  std::array<StencilSample, 4> plus, minus;
  for (int a = 0; a < 4; ++a) {
    Point qp = center.point, qm = center.point;
    qp[a] += h[a];
    qm[a] -= h[a];
    require_stencil_in_chart(spec, qp);
    require_stencil_in_chart(spec, qm);
    plus[a] = stencil_sample(point_geometry(spec, qp));
    minus[a] = stencil_sample(point_geometry(spec, qm));
  }
  StencilDerivatives r;
  double flux = 0.0;
  std::array<DTensor<3>, 4> dy, dbeta;
  for (int a = 0; a < 4; ++a) {
    const double inv = 1.0 / (2.0 * h[a]);
    flux += (plus[a].sqrt_det * plus[a].V(a) - minus[a].sqrt_det * minus[a].V(a)) * inv;
    dy[a] = (plus[a].Y - minus[a].Y) * inv;
    dbeta[a] = (plus[a].beta - minus[a].beta) * inv;
  }
  r.divV = flux / center.sqrt_det;
  const DTensor<4> ny = covariant_from_partials<3>(dy, c.Y, center.pack.gamma);
  DTensor<4> dY;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int k = 0; k < 16; ++k) dY.c[(a * 4 + b) * 16 + k] = ny.c[(a * 4 + b) * 16 + k] - ny.c[(b * 4 + a) * 16 + k];
  r.B = contract_FF(center.system.eigenforms[2], dY, center.system.ginv, -1.0 / 6.0);
  r.dbeta = dbeta[0](1, 2, 3) - dbeta[1](0, 2, 3) + dbeta[2](0, 1, 3) - dbeta[3](0, 1, 2);
  return r;
}

inline Point fd_steps(const MetricSpec& spec, const Point& p, double factor) {
  Point h = coordinate_scales(spec, p);
  for (double& x : h) x *= factor;
  return h;
}

// B with the outer d by central differences of the analytic field Y.
inline double term_B(const MetricSpec& spec, const Point& p, double step_factor = 1e-3) {
  const PointGeometry g = point_geometry(spec, p);
  const StencilSample c = stencil_sample(g);
  return stencil_derivatives(spec, g, c, fd_steps(spec, p, step_factor)).B;
}

// B entirely from Taylor jets: lambda3 as an exact jet, d and d* analytic.
inline double term_B_analytic(const MetricSpec& spec, const Point& p) {
  const CurvatureFields<4> cf = curvature_fields<4>(metric_field<4>(spec, p));
  const TField<2, 4> wplus = weyl_plus_field(cf, spec.orientation);
  const TField<2, 2> gi = truncate_field<2>(cf.ginv);
  const auto psums = lambda_power_sums(wplus, gi);
  const auto roots = trace_free_cubic_roots(psums[0].value(), psums[1].value());
  const SDWeylSystem sys = weyl_plus_system(curvature_pack<2>(truncate_field<2>(cf.g), false), spec.orientation);
  require_simple_top(sys);
  if (!(roots[2] > 0.0)) fail(ErrorCode::ZeroLambda3, "B needs lambda3 != 0");
  const Taylor<2> l3 = lambda3_jet(psums, roots[2]);
  const Taylor<2> inv = reciprocal(l3);
  TField<2, 4> z;
  for (int k = 0; k < 256; ++k) z.c[k] = wplus.c[k] * inv;
  const TField<0, 4> ddz = d_codifferential(z, cf.gamma, cf.ginv);
  return contract_FF(sys.eigenforms[2], values(ddz), sys.ginv, -1.0 / 6.0);
}

struct IdentityReport {
  Point point{};
  double divV = 0.0;
  double A = 0.0;
  double B = 0.0;
  double residual = 0.0;           // |divV - A - B| at the finest step
  double relative_residual = 0.0;  // residual / max(|A|, |B|, 1e-12)
  double fd_step = 0.0;            // finest step factor (times the coordinate scale)
  double observed_order = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> step_factors;
  std::vector<double> step_residuals;  // relative residual per step
  double divV_spectral = 0.0;          // |j|^2 - |nabla F|^2 / 4 + lambda3 - R / 6
  double star_v_residual = 0.0;        // max |*V - F ^ *dF|
  double dstar_v_residual = 0.0;       // |d(F ^ *dF)_0123 - divV eps_0123| at the finest step
  std::array<double, 3> lambdas{};
  double gap = 0.0;
};

inline double richardson_order(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log2(coarse / fine);
}

// Finite-difference step control. A non-empty `factors` list is used as
// given; otherwise the step starts at `initial` (times the coordinate scale)
// and is halved until the relative residual reaches `target` or the step
// would drop below `floor`, with at least `min_steps` evaluations.
struct StepPolicy {
  std::vector<double> factors;
  double initial = 1e-3;
  double floor = 1e-5;
  double target = 1e-6;
  int min_steps = 2;
};

inline StepPolicy fixed_steps(std::vector<double> factors) {
  StepPolicy p;
  p.factors = std::move(factors);
  return p;
}

inline IdentityReport verify_main_identity_at(const MetricSpec& spec, const Point& p, const StepPolicy& policy = {}) {
  const PointGeometry g = point_geometry(spec, p);
  const StencilSample c = stencil_sample(g);
  const SpectralGradient sg = spectral_gradient(g);
  const CurrentAndV jv = current_and_V(sg, g.system);
  IdentityReport r;
  r.point = p;
  r.A = term_A(sg, g.system, jv);
  r.divV_spectral = divergence_spectral(sg, g, jv);
  r.star_v_residual = max_abs_diff(star_vector(jv.V, g.eps), c.beta);
  r.lambdas = g.system.lambdas;
  r.gap = g.system.gap;
  auto evaluate = [&](double f) {
    const StencilDerivatives d = stencil_derivatives(spec, g, c, fd_steps(spec, p, f));
    r.divV = d.divV;
    r.B = d.B;
    r.residual = std::abs(d.divV - r.A - d.B);
    r.relative_residual = r.residual / std::max({std::abs(r.A), std::abs(d.B), 1e-12});
    r.dstar_v_residual = std::abs(d.dbeta - d.divV * g.eps(0, 1, 2, 3));
    r.fd_step = f;
    r.step_factors.push_back(f);
    r.step_residuals.push_back(r.relative_residual);
  };
  if (!policy.factors.empty()) {
    for (double f : policy.factors) evaluate(f);
  } else {
    if (!(policy.initial > 0.0) || policy.floor > policy.initial)
      fail(ErrorCode::InvalidSpec, "finite-difference step policy is inconsistent");
    double f = policy.initial;
    while (true) {
      evaluate(f);
      const bool enough = static_cast<int>(r.step_factors.size()) >= policy.min_steps;
      if (enough && r.relative_residual <= policy.target) break;
      if (f * 0.5 < policy.floor) break;
      f *= 0.5;
    }
  }
  const std::size_t n = r.step_residuals.size();
  if (n >= 2) r.observed_order = richardson_order(r.step_residuals[n - 2], r.step_residuals[n - 1]);
  return r;
}

struct IdentitySweep {
  std::vector<IdentityReport> rows;   // input order
  double max_relative_residual = 0.0;  // at the finest step
  double aggregate_order = std::numeric_limits<double>::quiet_NaN();  // from sup norms over points
};

// Aggregate order compares the sup norms over points of the last two
// relative residuals of every row.
inline IdentitySweep verify_main_identity(const MetricSpec& spec, const std::vector<Point>& points,
                                          const StepPolicy& policy = {}, int threads = 0) {
  IdentitySweep sw;
  sw.rows = parallel_map<IdentityReport>(
      points.size(), [&](std::size_t i) { return verify_main_identity_at(spec, points[i], policy); }, threads);
  double coarse = 0.0, fine = 0.0;
  bool paired = !sw.rows.empty();
  for (const auto& r : sw.rows) {
    sw.max_relative_residual = std::max(sw.max_relative_residual, r.relative_residual);
    const std::size_t n = r.step_residuals.size();
    if (n < 2) {
      paired = false;
      continue;
    }
    coarse = std::max(coarse, r.step_residuals[n - 2]);
    fine = std::max(fine, r.step_residuals[n - 1]);
  }
  if (paired) sw.aggregate_order = richardson_order(coarse, fine);
  return sw;
}

// Conformal relation for the divergence of the scaled self-dual Weyl tensor:
// ghat^{ef} nablahat_f (lhat3^{-1} What+_ebcd) against lhat3^{-1} g^{ef} nabla_f W+_ebcd,
// with ghat = lambda3^{2/3} g and lhat3 = lambda3^{1/3}.
inline IdentityResidual conformal_divergence_check(const MetricSpec& spec, const Point& p) {
  const CurvatureFields<3> cf = curvature_fields<3>(metric_field<3>(spec, p));
  const TField<1, 4> wp = weyl_plus_field(cf, spec.orientation);
  const auto ps = lambda_power_sums(wp, truncate_field<1>(cf.ginv));
  const double l3 = trace_free_cubic_roots(ps[0].value(), ps[1].value())[2];
  const double riem = norm(values(cf.riemann), values(cf.ginv));
  if (!(l3 > kLambdaZeroRel * riem)) fail(ErrorCode::ZeroLambda3, "conformal factor needs lambda3 > 0");
  const double lhat = std::cbrt(l3);
  const DTensor<5> nw = values(covariant_derivative(wp, cf.gamma));
  const Mat4 gi = values(cf.ginv);

  const MetricSpec hat = kahler_wrap(spec);
  const CurvatureFields<3> hf = curvature_fields<3>(metric_field<3>(hat, p));
  const TField<1, 4> whp = weyl_plus_field(hf, spec.orientation);
  const auto hps = lambda_power_sums(whp, truncate_field<1>(hf.ginv));
  const double lh0 = trace_free_cubic_roots(hps[0].value(), hps[1].value())[2];
  const Taylor<1> inv = reciprocal(lambda3_jet(hps, lh0));
  TField<1, 4> z;
  for (int k = 0; k < 256; ++k) z.c[k] = whp.c[k] * inv;
  const DTensor<5> nz = values(covariant_derivative(z, hf.gamma));
  const Mat4 hgi = values(hf.ginv);

  DTensor<3> lhs, rhs;
  for (int b = 0; b < 4; ++b)
    for (int c = 0; c < 4; ++c)
      for (int d = 0; d < 4; ++d) {
        double sl = 0.0, sr = 0.0;
        for (int e = 0; e < 4; ++e)
          for (int f = 0; f < 4; ++f) {
            sl += hgi(e, f) * nz(f, e, b, c, d);
            sr += gi(e, f) * nw(f, e, b, c, d);
          }
        lhs(b, c, d) = sl;
        rhs(b, c, d) = sr / lhat;
      }
  IdentityResidual r;
  r.residual = max_abs_diff(lhs, rhs);
  r.scale = std::max({max_abs(lhs), max_abs(rhs), max_abs(nw) / lhat});
  return r;
}

}  // namespace sdw

#endif  // SDW_IDENTITY_HPP
