#ifndef SDW_KAHLER_HPP
#define SDW_KAHLER_HPP

// Conformal rescaling by Omega = lambda3^{1/3}, the almost-complex structure of
// the top eigenform, and Kaehler / conformally Kaehler classification of
// sample sets.

#include <cmath>
#include <string_view>
#include <vector>

#include "sdw/identity.hpp"

namespace sdw {

// A fixed interior point of each catalog chart.
inline Point reference_point(const CatalogEntry& e) {
  switch (e.id) {
    case CatalogId::Flat: return {0.1, 0.2, 0.3, 0.4};
    case CatalogId::EuclideanSchwarzschild: return {0.3, 5.0 * e.param(0), 1.1, 0.4};
    case CatalogId::TaubNUT:
    case CatalogId::EguchiHanson: return {3.0 * e.param(0), 1.1, 0.4, 0.2};
    case CatalogId::Sphere4: return {0.3, 0.2, 0.7, 0.4};
    case CatalogId::ProductS2xS2: return {1.1, 0.4, 1.3, 0.2};
  }
  return {};
}

inline double lambda3_at(const MetricSpec& spec, const Point& p) {
  const CurvaturePack pack = curvature_pack(spec, p, false);
  const SDWeylSystem s = weyl_plus_system(pack, spec.orientation);
  if (!(s.lambdas[2] > kLambdaZeroRel * riemann_norm(pack)))
    fail(ErrorCode::ZeroLambda3, "lambda3 vanishes; no conformal rescaling");
  return s.lambdas[2];
}

// ghat = lambda3^{2/3} g after checking lambda3 > 0 at the probe points (the
// chart reference point when none are given).
inline MetricSpec kahler_rescale(const MetricSpec& spec, const std::vector<Point>& probes = {}) {
  if (probes.empty()) {
    lambda3_at(spec, reference_point(spec.base));
  } else {
    for (const Point& p : probes) lambda3_at(spec, p);
  }
  return kahler_wrap(spec);
}

// J^a_b = sqrt(2) Fhat_bc ghat^{ca}, returned as J(a, b).
inline Mat4 almost_complex_J(const MetricSpec& spec, const Point& p) {
  const MetricSpec hat = kahler_wrap(spec);
  const CurvaturePack pack = curvature_pack(hat, p, false);
  const SDWeylSystem s = weyl_plus_system(pack, spec.orientation);
  require_simple_top(s);
  const Mat4& f = s.eigenforms[2];
  Mat4 j;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double acc = 0.0;
      for (int c = 0; c < 4; ++c) acc += f(b, c) * s.ginv(c, a);
      j(a, b) = std::sqrt(2.0) * acc;
    }
  return j;
}

// max |J J + 1| and max |g(J., J.) - g| for a mixed tensor J(a, b) = J^a_b.
struct ComplexStructureResidual {
  double square = 0.0;
  double compatibility = 0.0;
};

inline ComplexStructureResidual complex_structure_residual(const Mat4& j, const Mat4& g) {
  ComplexStructureResidual r;
  const Mat4 jj = matmul(j, j);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      r.square = std::max(r.square, std::abs(jj(a, b) + (a == b ? 1.0 : 0.0)));
      double s = 0.0;
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) s += g(c, d) * j(c, a) * j(d, b);
      r.compatibility = std::max(r.compatibility, std::abs(s - g(a, b)));
    }
  return r;
}

enum class Verdict { Kahler, ConformallyKahler, Degenerate, Generic };

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Kahler: return "Kahler";
    case Verdict::ConformallyKahler: return "ConformallyKahler";
    case Verdict::Degenerate: return "Degenerate";
    case Verdict::Generic: return "Generic";
  }
  return "Unknown";
}

struct EigenPattern {
  double max_split = 0.0;       // max |lhat1 - lhat2| / lhat3
  double max_half_defect = 0.0; // max |lhat1 + lhat3 / 2| / lhat3
  bool double_eigenvalue = false;
};

struct KahlerVerdict {
  Verdict verdict = Verdict::Generic;
  double max_dF = 0.0;                 // sup |d Fhat|_ghat, central differences
  double max_nablaF = 0.0;             // sup |nablahat Fhat|_ghat / (|What+|^{1/2} |Fhat|)
  double max_nablaF_abs = 0.0;         // sup |nablahat Fhat|_ghat
  double max_nablaF_unrescaled = 0.0;  // sup |nabla F|_g / (|W+|^{1/2} |F|)
  std::size_t worst_point = 0;         // index of the largest rescaled |nablahat Fhat|
  std::size_t degenerate_points = 0;
  EigenPattern eigen_pattern;
};

// |d F|_g of the top eigenform by central differences, with the eigenform
// sign at each stencil point aligned to the center.
inline double closedness_defect(const MetricSpec& spec, const Point& p, const SDWeylSystem& center,
                                double step_factor = 1e-4) {
  const Point h = fd_steps(spec, p, step_factor);
  const Mat4& fc = center.eigenforms[2];
  std::array<Mat4, 4> dF;
  for (int a = 0; a < 4; ++a) {
    std::array<Mat4, 2> side;
    for (int k = 0; k < 2; ++k) {
      Point q = p;
      q[a] += (k == 0 ? h[a] : -h[a]);
      require_stencil_in_chart(spec, q);
      const SDWeylSystem s = weyl_plus_system(curvature_pack(spec, q, false), spec.orientation);
      require_simple_top(s);
      const Mat4& f = s.eigenforms[2];
      side[k] = inner(f, fc, center.ginv) < 0.0 ? f * -1.0 : f;
    }
    dF[a] = (side[0] - side[1]) * (1.0 / (2.0 * h[a]));
  }
  DTensor<3> d;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) d(a, b, c) = dF[a](b, c) + dF[b](c, a) + dF[c](a, b);
  return norm(d, center.ginv);
}

struct ParallelSample {
  bool simple = true;
  double nabla_rel = 0.0;      // unrescaled, normalized
  double nabla_hat_rel = 0.0;  // rescaled, normalized
  double nabla_hat_abs = 0.0;
  double dF_hat = 0.0;
  std::array<double, 3> lambdas_hat{};
};

inline ParallelSample parallel_sample(const MetricSpec& spec, const Point& p) {
  ParallelSample r;
  lambda3_at(spec, p);
  const PointGeometry g = point_geometry(spec, p);
  if (!g.system.simple_top) {
    r.simple = false;
    return r;
  }
  const SpectralGradient sg = spectral_gradient(g);
  r.nabla_rel = norm(sg.nablaF, g.system.ginv) / (std::sqrt(g.system.wplus_norm) * std::sqrt(2.0));

  const MetricSpec hat = kahler_wrap(spec);
  const PointGeometry hg = point_geometry(hat, p);
  r.lambdas_hat = hg.system.lambdas;
  if (!hg.system.simple_top) {
    r.simple = false;
    return r;
  }
  const SpectralGradient hsg = spectral_gradient(hg);
  r.nabla_hat_abs = norm(hsg.nablaF, hg.system.ginv);
  r.nabla_hat_rel = r.nabla_hat_abs / (std::sqrt(hg.system.wplus_norm) * std::sqrt(2.0));
  r.dF_hat = closedness_defect(hat, p, hg.system);
  return r;
}

inline KahlerVerdict check_parallel(const MetricSpec& spec, const std::vector<Point>& points, double tol = 1e-6,
                                    int threads = 0) {
  const auto samples = parallel_map<ParallelSample>(
      points.size(), [&](std::size_t i) { return parallel_sample(spec, points[i]); }, threads);
  KahlerVerdict v;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const ParallelSample& s = samples[i];
    if (!s.simple) {
      ++v.degenerate_points;
      continue;
    }
    v.max_nablaF_unrescaled = std::max(v.max_nablaF_unrescaled, s.nabla_rel);
    if (s.nabla_hat_rel > v.max_nablaF || i == 0) v.worst_point = s.nabla_hat_rel > v.max_nablaF ? i : v.worst_point;
    v.max_nablaF = std::max(v.max_nablaF, s.nabla_hat_rel);
    v.max_nablaF_abs = std::max(v.max_nablaF_abs, s.nabla_hat_abs);
    v.max_dF = std::max(v.max_dF, s.dF_hat);
    const double l3 = s.lambdas_hat[2];
    v.eigen_pattern.max_split = std::max(v.eigen_pattern.max_split, std::abs(s.lambdas_hat[0] - s.lambdas_hat[1]) / l3);
    v.eigen_pattern.max_half_defect =
        std::max(v.eigen_pattern.max_half_defect, std::abs(s.lambdas_hat[0] + 0.5 * l3) / l3);
  }
  v.eigen_pattern.double_eigenvalue = v.eigen_pattern.max_split <= 1e-6 && v.eigen_pattern.max_half_defect <= 1e-6;
  if (v.degenerate_points > 0)
    v.verdict = Verdict::Degenerate;
  else if (v.max_nablaF_unrescaled <= tol)
    v.verdict = Verdict::Kahler;
  else if (v.max_nablaF <= tol)
    v.verdict = Verdict::ConformallyKahler;
  else
    v.verdict = Verdict::Generic;
  return v;
}

// Bhat through the trace-free Ricci tensor of g:
// -1/3 Phat^{abcd} nablahat_a (lhat3^{-1} nabla_d E_bc), with
// Phat^{abcd} = Fhat^ab Fhat^cd - (ghat^ac ghat^bd - ghat^ad ghat^bc + epshat^abcd) / 6.
inline double hatted_B_trace_free_ricci(const MetricSpec& spec, const Point& p) {
  const CurvatureFields<4> cf = curvature_fields<4>(metric_field<4>(spec, p));
  const TField<2, 4> wp = weyl_plus_field(cf, spec.orientation);
  const auto ps = lambda_power_sums(wp, truncate_field<2>(cf.ginv));
  const double l0 = trace_free_cubic_roots(ps[0].value(), ps[1].value())[2];
  if (!(l0 > kLambdaZeroRel * norm(values(cf.riemann), values(cf.ginv))))
    fail(ErrorCode::ZeroLambda3, "conformal factor needs lambda3 > 0");
  const Taylor<2> omega = cbrt(lambda3_jet(ps, l0));
  const TField<1, 3> ne = covariant_derivative(cf.trace_free_ricci, cf.gamma);  // (d, b, c)
  const Taylor<1> inv = reciprocal(truncate<1>(omega));
  TField<1, 3> t;
  for (int k = 0; k < 64; ++k) t.c[k] = ne.c[k] * inv;
  TField<2, 2> ghat;
  const Taylor<2> o2 = omega * omega;
  const TField<2, 2> g2 = truncate_field<2>(cf.g);
  for (int k = 0; k < 16; ++k) ghat.c[k] = g2.c[k] * o2;
  const TField<2, 2> ghinv = inverse_field(ghat);
  const DTensor<4> nt = values(covariant_derivative(t, christoffel(ghat, ghinv)));  // (a, d, b, c)

  const MetricSpec hat = kahler_wrap(spec);
  const CurvaturePack hp = curvature_pack(hat, p, false);
  const SDWeylSystem hs = weyl_plus_system(hp, spec.orientation);
  require_simple_top(hs);
  const Mat4 gi = hp.ginv;
  const Mat4 fu = raise_all(hs.eigenforms[2], gi);
  const DTensor<4> eu = raise_all(volume_form(hp.g, spec.orientation), gi);
  double b = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int bb = 0; bb < 4; ++bb)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          const double P = fu(a, bb) * fu(c, d) - (gi(a, c) * gi(bb, d) - gi(a, d) * gi(bb, c) + eu(a, bb, c, d)) / 6.0;
          b += P * nt(a, d, bb, c);
        }
  return -b / 3.0;
}

}  // namespace sdw

#endif  // SDW_KAHLER_HPP
