#ifndef SDW_ASYMPTOTICS_HPP
#define SDW_ASYMPTOTICS_HPP

// Conformal norm identities, radial decay fits, and boundary 3-form estimates
// on the level sets of the chart radius.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdw/perturbation.hpp"

namespace sdw {

// ------------------------------------------------------ norm identities

struct NormIdentityRow {
  Point point{};
  double omega = 0.0;
  double fhat_norm = 0.0;  // |Fhat|_g, expected sqrt(2) Omega^2
  double eps_norm = 0.0;   // |epshat|_g, expected sqrt(24) Omega^4
  double ginv_norm = 0.0;  // |ghat^{-1}|_g, expected 2 Omega^{-2}
  double max_relative = 0.0;
};

struct NormIdentityReport {
  std::vector<NormIdentityRow> rows;
  double max_relative = 0.0;
};

// Fhat, epshat and ghat^{-1} come from the rescaled metric's own system and
// are measured with g.
inline NormIdentityRow norm_identity_row(const MetricSpec& spec, const Point& p) {
  NormIdentityRow r;
  r.point = p;
  const Mat4 g = metric_value(spec, p);
  const Mat4 ginv = inverse_field(g);
  r.omega = std::cbrt(lambda3_at(spec, p));
  const CurvaturePack hp = curvature_pack(kahler_wrap(spec), p, false);
  const SDWeylSystem hs = weyl_plus_system(hp, spec.orientation);
  r.fhat_norm = norm(hs.eigenforms[2], ginv);
  r.eps_norm = norm(volume_form(hp.g, spec.orientation), ginv);
  r.ginv_norm = norm(hp.ginv, g);
  const double w2 = r.omega * r.omega;
  r.max_relative = std::max({std::abs(r.fhat_norm / (std::sqrt(2.0) * w2) - 1.0),
                             std::abs(r.eps_norm / (std::sqrt(24.0) * w2 * w2) - 1.0),
                             std::abs(r.ginv_norm * w2 / 2.0 - 1.0)});
  return r;
}

inline NormIdentityReport norm_identities_check(const MetricSpec& spec, const std::vector<Point>& points,
                                                int threads = 0) {
  NormIdentityReport rep;
  rep.rows = parallel_map<NormIdentityRow>(
      points.size(), [&](std::size_t i) { return norm_identity_row(spec, points[i]); }, threads);
  for (const auto& r : rep.rows) rep.max_relative = std::max(rep.max_relative, r.max_relative);
  return rep;
}

// ------------------------------------------------------ decay fits

enum class DecayField { Omega, FhatNorm, EpsHatNorm, GhatInvNorm, InvLambdaHat3, PhatNorm };

constexpr std::string_view to_string(DecayField f) {
  switch (f) {
    case DecayField::Omega: return "Omega";
    case DecayField::FhatNorm: return "Fhat";
    case DecayField::EpsHatNorm: return "epshat";
    case DecayField::GhatInvNorm: return "ghat_inv";
    case DecayField::InvLambdaHat3: return "inv_lambdahat3";
    case DecayField::PhatNorm: return "Phat";
  }
  return "unknown";
}

inline std::optional<DecayField> decay_field_from_string(std::string_view s) {
  for (DecayField f : {DecayField::Omega, DecayField::FhatNorm, DecayField::EpsHatNorm, DecayField::GhatInvNorm,
                       DecayField::InvLambdaHat3, DecayField::PhatNorm})
    if (to_string(f) == s) return f;
  return std::nullopt;
}

inline double decay_value(const MetricSpec& spec, DecayField f, const Point& p) {
  if (f == DecayField::Omega) return std::cbrt(lambda3_at(spec, p));
  lambda3_at(spec, p);
  const Mat4 g = metric_value(spec, p);
  const Mat4 ginv = inverse_field(g);
  const CurvaturePack hp = curvature_pack(kahler_wrap(spec), p, false);
  const SDWeylSystem hs = weyl_plus_system(hp, spec.orientation);
  switch (f) {
    case DecayField::FhatNorm: return norm(hs.eigenforms[2], ginv);
    case DecayField::EpsHatNorm: return norm(volume_form(hp.g, spec.orientation), ginv);
    case DecayField::GhatInvNorm: return norm(hp.ginv, g);
    case DecayField::InvLambdaHat3: return 1.0 / hs.lambdas[2];
    case DecayField::PhatNorm:
      require_simple_top(hs);
      return norm(phat_lower(hs.eigenforms[2], hp.g, spec.orientation), ginv);
    default: break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

struct DecayReport {
  std::string field_name;
  std::vector<double> radii;
  std::vector<double> norms;
  double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
  double fit_residual = 0.0;  // rms deviation of log norms from the fitted line
  double upper_half_exponent = std::numeric_limits<double>::quiet_NaN();
};

struct LogLogFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = 0.0;
  double rms = 0.0;
};

inline LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  LogLogFit f;
  f.slope = loglog_slope(x, y);
  if (!std::isfinite(f.slope)) return f;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= x.size();
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = std::log(y[i]) - (f.intercept + f.slope * std::log(x[i]));
    ss += e * e;
  }
  f.rms = std::sqrt(ss / x.size());
  return f;
}

inline void require_radial_chart(const MetricSpec& spec) {
  if (chart_info(spec.base.id).radial_index < 0)
    fail(ErrorCode::InvalidSpec, std::string(to_string(spec.base.id)) + " has no radial coordinate");
}

inline void require_increasing(const std::vector<double>& radii) {
  if (radii.size() < 2) fail(ErrorCode::InvalidSpec, "need at least two radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) fail(ErrorCode::InvalidSpec, "radii must be strictly increasing");
}

// The chart reference point with its radial coordinate replaced by r.
inline Point radial_point(const MetricSpec& spec, double r, std::optional<Point> base = {}) {
  Point p = base.value_or(reference_point(spec.base));
  p[chart_info(spec.base.id).radial_index] = r;
  if (!in_chart(spec.base.id, spec.base.params, p)) fail(ErrorCode::PointOutsideChart, "radius outside chart");
  return p;
}

inline DecayReport decay_fit(const MetricSpec& spec, DecayField field, const std::vector<double>& radii,
                             std::optional<Point> base = {}, int threads = 0) {
  require_radial_chart(spec);
  require_increasing(radii);
  DecayReport rep;
  rep.field_name = std::string(to_string(field));
  rep.radii = radii;
  rep.norms = parallel_map<double>(
      radii.size(), [&](std::size_t i) { return decay_value(spec, field, radial_point(spec, radii[i], base)); },
      threads);
  for (double v : rep.norms)
    if (!(v > 0.0)) fail(ErrorCode::ZeroLambda3, "non-positive norm along the ray");
  const LogLogFit f = loglog_fit(rep.radii, rep.norms);
  rep.fitted_exponent = f.slope;
  rep.fit_residual = f.rms;
  const std::size_t h = radii.size() / 2;
  if (radii.size() - h >= 2)
    rep.upper_half_exponent = loglog_slope({radii.begin() + h, radii.end()}, {rep.norms.begin() + h, rep.norms.end()});
  return rep;
}

// ------------------------------------------------------ boundary estimates

struct Interval {
  double lo, hi;
};

// Coordinate ranges of the chart's angular and fiber coordinates on {r = const},
// in the order of ChartInfo::sphere_coords.
inline std::array<Interval, 3> sigma_ranges(const CatalogEntry& e) {
  constexpr double pi = 3.14159265358979323846;
  switch (e.id) {
    case CatalogId::EuclideanSchwarzschild: return {{{0.0, 8.0 * pi * e.param(0)}, {0.0, pi}, {0.0, 2.0 * pi}}};
    case CatalogId::TaubNUT: return {{{0.0, pi}, {0.0, 2.0 * pi}, {0.0, 4.0 * pi}}};
    case CatalogId::EguchiHanson: return {{{0.0, pi}, {0.0, 2.0 * pi}, {0.0, 2.0 * pi}}};
    default: break;
  }
  fail(ErrorCode::InvalidSpec, std::string(to_string(e.id)) + " has no level sets of a radius");
}

struct BoundarySample {
  double r = 0.0;
  double integrand_norm = 0.0;    // mean over nodes of |T|_g |nabla delta2 Fhat|_g
  double literal_norm = 0.0;      // mean over nodes of |Fhat ^ *hat d(delta2 Fhat)|_g
  double surface_estimate = 0.0;  // integral of the majorant against the induced volume
  double literal_surface = 0.0;   // integral of the restricted literal 3-form
};

struct BoundaryReport {
  std::vector<BoundarySample> samples;
  double integrand_exponent = std::numeric_limits<double>::quiet_NaN();
  double surface_exponent = std::numeric_limits<double>::quiet_NaN();
};

struct BoundaryOptions {
  int resolution = 16;  // midpoint nodes per coordinate of Sigma_r
  double spatial_factor = 1e-2;
  int threads = 0;
};

struct NodeValues {
  double majorant = 0.0;
  double literal = 0.0;
  double literal_restricted = 0.0;  // alpha on the ordered sphere coordinates
  double induced_volume = 0.0;      // sqrt det of g restricted to Sigma_r
};

// d^2 Fhat / ds^2 at q by the 5-point stencil, sign-aligned with ref.
inline Mat4 delta2_Fhat(const CurveSpec& curve, const Point& q, const SignReference& ref, double h) {
  auto at = [&](double s) {
    const std::vector<double> v = curve_quantity(curve, s, q, Quantity::Fhat, ref);
    Mat4 m;
    std::copy(v.begin(), v.end(), m.c.begin());
    return m;
  };
  const Mat4 c = at(0.0);
  return (((at(h) - c) + (at(-h) - c)) * 16.0 - ((at(2.0 * h) - c) + (at(-2.0 * h) - c))) * (1.0 / (12.0 * h * h));
}

// Frame components X(i, j, ...) = e_i^a e_j^b ... X_ab... of a covariant tensor.
template <int R>
DTensor<R> to_frame_lower(const DTensor<R>& t, const Tetrad& e) {
  DTensor<R> cur = t;
  for (int slot = 0; slot < R; ++slot) {
    DTensor<R> u;
    for (int k = 0; k < DTensor<R>::size; ++k) {
      auto idx = DTensor<R>::unflat(k);
      double s = 0.0;
      for (int a = 0; a < 4; ++a) {
        auto j = idx;
        j[slot] = a;
        int kk = 0;
        for (int i = 0; i < R; ++i) kk = 4 * kk + j[i];
        s += e.e[idx[slot]](a) * cur.c[kk];
      }
      u.c[k] = s;
    }
    cur = u;
  }
  return cur;
}

inline NodeValues boundary_node(const CurveSpec& curve, const Point& q, const BoundaryOptions& opt) {
  const MetricSpec& base = curve.base;
  const int o = base.orientation;
  const SignReference ref = sign_reference(curve, q);
  const double hs = curve.h_s;
  const Mat4 x0 = delta2_Fhat(curve, q, ref, hs);
  const Point hx = fd_steps(base, q, opt.spatial_factor);
  std::array<Mat4, 4> dx;  // (v) -> d_v delta2 Fhat
  for (int v = 0; v < 4; ++v) {
    std::array<Mat4, 2> side;
    for (int k = 0; k < 2; ++k) {
      Point qq = q;
      qq[v] += (k == 0 ? 1.0 : -1.0) * hx[v];
      require_stencil_in_chart(base, qq);
      SignReference rq = sign_reference(curve, qq);
      rq.f = rq.f * align_sign(rq.f, ref);
      side[k] = delta2_Fhat(curve, qq, rq, hs);
    }
    dx[v] = (side[0] - side[1]) * (1.0 / (2.0 * hx[v]));
  }
  const TField<1, 2> g1 = metric_field<1>(base, q);
  const Mat4 g = values(g1);
  const Mat4 ginv = inverse_field(g);
  const TField<0, 3> gam = christoffel(g1, inverse_field(g1));
  DTensor<3> nx, dform;  // nabla_d X_ef and (dX)_abc
  for (int d = 0; d < 4; ++d)
    for (int e = 0; e < 4; ++e)
      for (int f = 0; f < 4; ++f) {
        double v = dx[d](e, f);
        for (int k = 0; k < 4; ++k) v -= gam(k, d, e).value() * x0(k, f) + gam(k, d, f).value() * x0(e, k);
        nx(d, e, f) = v;
        dform(d, e, f) = dx[d](e, f) + dx[e](f, d) + dx[f](d, e);
      }

  // background Kaehler data: Fhat aligned with ref, epshat, ghat^{-1}
  const CurvaturePack hp = curvature_pack(kahler_wrap(base), q, false);
  const Mat4& f = ref.f;
  const DTensor<4> eps = volume_form(hp.g, o);
  const Mat4& gh = hp.ginv;

  // literal alpha = Fhat ^ *hat dX, (*hat w)_d = 1/6 w^{abc} epshat_abcd
  const DTensor<3> wu = raise_all(dform, gh);
  Vec4 beta;
  for (int d = 0; d < 4; ++d) {
    double s = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) s += wu(a, b, c) * eps(a, b, c, d);
    beta(d) = s / 6.0;
  }
  DTensor<3> alpha;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) alpha(a, b, c) = f(a, b) * beta(c) + f(b, c) * beta(a) + f(c, a) * beta(b);

  // majorant: |T|_g |nabla X|_g with T_abc^def = F_[ab epshat_c]klm ghat^kd ghat^le ghat^mf,
  // evaluated in a g-orthonormal frame where g-norms are plain sums of squares
  const Tetrad tet = orthonormal_tetrad(g, o);
  const auto th = coframe(tet, g);
  const Mat4 ff = to_frame_lower(f, tet);
  const DTensor<4> ef = to_frame_lower(eps, tet);
  Mat4 ghf;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) s += th[i](a) * th[j](b) * gh(a, b);
      ghf(i, j) = s;
    }
  DTensor<4> qf;  // Q_c^{def} = eps_cklm ghat^kd ghat^le ghat^mf
  for (int c = 0; c < 4; ++c)
    for (int d = 0; d < 4; ++d)
      for (int e = 0; e < 4; ++e)
        for (int h = 0; h < 4; ++h) {
          double s = 0.0;
          for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l)
              for (int m = 0; m < 4; ++m) s += ef(c, k, l, m) * ghf(k, d) * ghf(l, e) * ghf(m, h);
          qf(c, d, e, h) = s;
        }
  double t2 = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int k = 0; k < 64; ++k) {
          const int d = k / 16, e = (k / 4) % 4, h = k % 4;
          const double t = (ff(a, b) * qf(c, d, e, h) + ff(b, c) * qf(a, d, e, h) + ff(c, a) * qf(b, d, e, h)) / 3.0;
          t2 += t * t;
        }
  NodeValues nv;
  nv.majorant = std::sqrt(t2) * norm(nx, ginv);
  nv.literal = norm(alpha, ginv);
  const auto sc = chart_info(base.base.id).sphere_coords;
  nv.literal_restricted = alpha(sc[0], sc[1], sc[2]);
  Mat4 hsub;  // restricted metric in the top-left 3x3 block, unit in the corner
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) hsub(i, j) = g(sc[i], sc[j]);
  hsub(3, 3) = 1.0;
  nv.induced_volume = std::sqrt(std::max(0.0, det4(hsub)));
  return nv;
}

inline BoundarySample boundary_sample(const CurveSpec& curve, double r, const BoundaryOptions& opt) {
  const MetricSpec& base = curve.base;
  require_radial_chart(base);
  const auto rng = sigma_ranges(base.base);
  const auto sc = chart_info(base.base.id).sphere_coords;
  const int n = std::max(1, opt.resolution);
  const Point p0 = radial_point(base, r);
  std::vector<Point> nodes;
  nodes.reserve(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Point q = p0;
        const int ijk[3] = {i, j, k};
        for (int t = 0; t < 3; ++t) q[sc[t]] = rng[t].lo + (ijk[t] + 0.5) * (rng[t].hi - rng[t].lo) / n;
        nodes.push_back(q);
      }
  const auto vals = parallel_map<NodeValues>(
      nodes.size(), [&](std::size_t i) { return boundary_node(curve, nodes[i], opt); }, opt.threads);
  double cell = 1.0;
  for (int t = 0; t < 3; ++t) cell *= (rng[t].hi - rng[t].lo) / n;
  BoundarySample s;
  s.r = r;
  for (const auto& v : vals) {
    s.integrand_norm += v.majorant;
    s.literal_norm += v.literal;
    s.surface_estimate += v.majorant * v.induced_volume * cell;
    s.literal_surface += v.literal_restricted * cell;
  }
  s.integrand_norm /= vals.size();
  s.literal_norm /= vals.size();
  return s;
}

inline BoundaryReport boundary_integral_estimate(const CurveSpec& curve, const std::vector<double>& r_list,
                                                 const BoundaryOptions& opt = {}) {
  require_increasing(r_list);
  BoundaryReport rep;
  for (double r : r_list) rep.samples.push_back(boundary_sample(curve, r, opt));
  std::vector<double> in, su;
  bool positive = true;
  for (const auto& s : rep.samples) {
    in.push_back(s.integrand_norm);
    su.push_back(std::abs(s.surface_estimate));
    positive = positive && s.integrand_norm > 0.0 && s.surface_estimate > 0.0;
  }
  if (positive) {
    rep.integrand_exponent = loglog_slope(r_list, in);
    rep.surface_exponent = loglog_slope(r_list, su);
  }
  return rep;
}

}  // namespace sdw

#endif  // SDW_ASYMPTOTICS_HPP
