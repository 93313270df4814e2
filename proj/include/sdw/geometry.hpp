#ifndef SDW_GEOMETRY_HPP
#define SDW_GEOMETRY_HPP

// Metric catalog, conformal / deformation / pullback wrappers, metric jets
// and one-parameter curves of metrics.

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "sdw/errors.hpp"
#include "sdw/fields.hpp"
#include "sdw/taylor.hpp"
#include "sdw/tensor.hpp"

namespace sdw {

using Point = std::array<double, 4>;

enum class CatalogId { Flat, EuclideanSchwarzschild, TaubNUT, EguchiHanson, Sphere4, ProductS2xS2 };

constexpr std::string_view to_string(CatalogId id) {
  switch (id) {
    case CatalogId::Flat: return "Flat";
    case CatalogId::EuclideanSchwarzschild: return "EuclideanSchwarzschild";
    case CatalogId::TaubNUT: return "TaubNUT";
    case CatalogId::EguchiHanson: return "EguchiHanson";
    case CatalogId::Sphere4: return "Sphere4";
    case CatalogId::ProductS2xS2: return "ProductS2xS2";
  }
  return "?";
}

inline std::optional<CatalogId> catalog_from_string(std::string_view s) {
  for (auto id : {CatalogId::Flat, CatalogId::EuclideanSchwarzschild, CatalogId::TaubNUT, CatalogId::EguchiHanson,
                  CatalogId::Sphere4, CatalogId::ProductS2xS2})
    if (to_string(id) == s) return id;
  return std::nullopt;
}

struct ChartPoint {
  CatalogId chart = CatalogId::Flat;
  Point coords{};
};

// Static description of a catalog chart.
struct ChartInfo {
  CatalogId id;
  std::array<std::string_view, 4> coord_names;
  std::vector<std::string_view> param_names;
  std::vector<double> default_params;
  int radial_index;          // -1 when the chart has no radius function
  std::array<int, 3> sphere_coords;  // coordinates spanning {r = const}, or {-1,..}
  // orientation in which the metric is half-flat (W+ = 0), 0 if none
  int half_flat_orientation;
  std::string_view note;
};

inline const ChartInfo& chart_info(CatalogId id) {
  static const ChartInfo infos[] = {
      {CatalogId::Flat, {"x0", "x1", "x2", "x3"}, {}, {}, -1, {-1, -1, -1}, 0, "Euclidean R^4, Cartesian chart"},
      {CatalogId::EuclideanSchwarzschild,
       {"tau", "r", "theta", "phi"},
       {"m"},
       {1.0},
       1,
       {0, 2, 3},
       0,
       "(1-2m/r) dtau^2 + dr^2/(1-2m/r) + r^2 dOmega^2, r > 2m"},
      {CatalogId::TaubNUT,
       {"r", "theta", "phi", "psi"},
       {"n"},
       {1.0},
       0,
       {1, 2, 3},
       1,
       "self-dual Taub-NUT, r > n; half-flat for orientation +1"},
      {CatalogId::EguchiHanson,
       {"r", "theta", "phi", "psi"},
       {"a"},
       {1.0},
       0,
       {1, 2, 3},
       -1,
       "Eguchi-Hanson, r > a; half-flat for orientation -1"},
      {CatalogId::Sphere4, {"x0", "x1", "x2", "x3"}, {"a"}, {1.0}, -1, {-1, -1, -1}, 0,
       "round S^4 of radius a, stereographic chart"},
      {CatalogId::ProductS2xS2,
       {"theta1", "phi1", "theta2", "phi2"},
       {"a", "b"},
       {1.0, 1.0},
       -1,
       {-1, -1, -1},
       0,
       "S^2(a) x S^2(b), polar angles in (0, pi)"},
  };
  return infos[static_cast<int>(id)];
}

struct CatalogEntry {
  CatalogId id = CatalogId::Flat;
  std::vector<double> params;  // in chart_info(id).param_names order

  double param(int i) const { return params.at(i); }
};

inline CatalogEntry make_catalog(CatalogId id, std::vector<double> params = {}) {
  const auto& info = chart_info(id);
  if (params.empty()) params = info.default_params;
  if (params.size() != info.param_names.size())
    fail(ErrorCode::InvalidSpec, std::string(to_string(id)) + ": wrong number of parameters");
  for (double p : params)
    if (!(p > 0.0)) fail(ErrorCode::InvalidSpec, std::string(to_string(id)) + ": parameters must be positive");
  return {id, std::move(params)};
}

// Compactly supported smooth bump exp(1 - 1/(1-q)), q = sum ((x-c)/w)^2 over
// coordinates with w > 0. Equal to 1 at the centre, identically 0 for q >= 1.
struct BumpProfile {
  Point center{};
  Point widths{1.0, 1.0, 1.0, 1.0};
  bool constant = false;  // profile identically 1

  template <class S>
  S evaluate(const std::array<S, 4>& x) const {
    if (constant) return S(1.0);
    S q(0.0);
    for (int v = 0; v < 4; ++v) {
      if (!(widths[v] > 0.0)) continue;
      S u = (x[v] - center[v]) * (1.0 / widths[v]);
      q += u * u;
    }
    if (value_of(q) >= 1.0) return S(0.0);
    using std::exp;
    return exp(1.0 - 1.0 / (1.0 - q));
  }
};

// xi(x) = bump(x) * (v + L (x - c))
struct VectorFieldSpec {
  BumpProfile bump;
  Point v{};
  Mat4 linear{};

  template <class S>
  std::array<S, 4> evaluate(const std::array<S, 4>& x) const {
    const S b = bump.evaluate(x);
    std::array<S, 4> r;
    for (int i = 0; i < 4; ++i) {
      S comp(v[i]);
      for (int j = 0; j < 4; ++j)
        if (linear(i, j) != 0.0) comp += (x[j] - bump.center[j]) * linear(i, j);
      r[i] = b * comp;
    }
    return r;
  }
};

// Scalar conformal factors Omega (the wrapped metric is Omega^2 g).
struct ConstantOmega {
  double c = 1.0;
};
struct BumpOmega {  // Omega = 1 + amplitude * bump
  BumpProfile bump;
  double amplitude = 0.0;
};
struct Lambda3Omega {};  // Omega = lambda3^{1/3} of the wrapped metric

using ScalarFieldSpec = std::variant<ConstantOmega, BumpOmega, Lambda3Omega>;

struct ConformalWrapper {
  ScalarFieldSpec omega;
};
// g + amplitude * bump(x) * H, H a constant symmetric matrix
struct DeformationWrapper {
  BumpProfile bump;
  Mat4 h{};
  double amplitude = 0.0;
};
// pullback by x -> x + s xi(x)
struct PullbackWrapper {
  VectorFieldSpec xi;
  double s = 0.0;
};

using Wrapper = std::variant<ConformalWrapper, DeformationWrapper, PullbackWrapper>;

struct MetricSpec {
  CatalogEntry base;
  int orientation = 1;
  std::vector<Wrapper> wrappers;  // applied in order, innermost first

  CatalogId chart() const { return base.id; }
};

inline MetricSpec make_spec(CatalogId id, std::vector<double> params = {}, int orientation = 1) {
  if (orientation != 1 && orientation != -1) fail(ErrorCode::InvalidSpec, "orientation must be +1 or -1");
  return MetricSpec{make_catalog(id, std::move(params)), orientation, {}};
}

inline MetricSpec with_orientation(MetricSpec s, int orientation) {
  s.orientation = orientation;
  return s;
}

// ---------------------------------------------------------------- catalog

inline bool in_chart(CatalogId id, const std::vector<double>& prm, const Point& x) {
  constexpr double pi = 3.14159265358979323846;
  for (double c : x)
    if (!std::isfinite(c)) return false;
  switch (id) {
    case CatalogId::Flat:
    case CatalogId::Sphere4: return true;
    case CatalogId::EuclideanSchwarzschild: return x[1] > 2.0 * prm[0] && x[2] > 0.0 && x[2] < pi;
    case CatalogId::TaubNUT: return x[0] > prm[0] && x[1] > 0.0 && x[1] < pi;
    case CatalogId::EguchiHanson: return x[0] > prm[0] && x[1] > 0.0 && x[1] < pi;
    case CatalogId::ProductS2xS2: return x[0] > 0.0 && x[0] < pi && x[2] > 0.0 && x[2] < pi;
  }
  return false;
}

template <class S>
Tensor<S, 2> catalog_metric(const CatalogEntry& e, const std::array<S, 4>& x) {
  using std::cos;
  using std::sin;
  Tensor<S, 2> g;
  switch (e.id) {
    case CatalogId::Flat:
      for (int a = 0; a < 4; ++a) g(a, a) = S(1.0);
      break;
    case CatalogId::EuclideanSchwarzschild: {
      const double m = e.param(0);
      const S& r = x[1];
      const S f = 1.0 - 2.0 * m / r;
      const S st = sin(x[2]);
      g(0, 0) = f;
      g(1, 1) = 1.0 / f;
      g(2, 2) = r * r;
      g(3, 3) = r * r * st * st;
      break;
    }
    case CatalogId::TaubNUT: {
      const double n = e.param(0);
      const S& r = x[0];
      const S ratio = (r + n) / (r - n);
      const S area = r * r - n * n;
      const S fib = 4.0 * n * n / ratio;
      const S ct = cos(x[1]), st = sin(x[1]);
      g(0, 0) = ratio;
      g(1, 1) = area;
      g(2, 2) = area * st * st + fib * ct * ct;
      g(3, 3) = fib;
      g(2, 3) = fib * ct;
      g(3, 2) = g(2, 3);
      break;
    }
    case CatalogId::EguchiHanson: {
      const double a = e.param(0);
      const S& r = x[0];
      const S r2 = r * r;
      const S u = 1.0 - (a * a * a * a) / (r2 * r2);
      const S ct = cos(x[1]), st = sin(x[1]);
      const S q = r2 * 0.25;
      g(0, 0) = 1.0 / u;
      g(1, 1) = q;
      g(2, 2) = q * st * st + q * u * ct * ct;
      g(3, 3) = q * u;
      g(2, 3) = q * u * ct;
      g(3, 2) = g(2, 3);
      break;
    }
    case CatalogId::Sphere4: {
      const double a = e.param(0);
      S rho2(0.0);
      for (int v = 0; v < 4; ++v) rho2 += x[v] * x[v];
      const S den = 1.0 + rho2;
      const S conf = 4.0 * a * a / (den * den);
      for (int v = 0; v < 4; ++v) g(v, v) = conf;
      break;
    }
    case CatalogId::ProductS2xS2: {
      const double a = e.param(0), b = e.param(1);
      const S s1 = sin(x[0]), s2 = sin(x[2]);
      g(0, 0) = S(a * a);
      g(1, 1) = a * a * s1 * s1;
      g(2, 2) = S(b * b);
      g(3, 3) = b * b * s2 * s2;
      break;
    }
  }
  return g;
}

// Threshold below which lambda3 counts as zero, relative to |Riemann|.
inline constexpr double kLambdaZeroRel = 1e-9;
// Simplicity threshold on 2(lambda3 - lambda2), relative to max(1, |W+|).
inline constexpr double kGapRel = 1e-7;

// ----------------------------------------------------------- evaluation

template <int N>
std::array<Taylor<N>, 4> coordinate_jet(const Point& p) {
  std::array<Taylor<N>, 4> x;
  for (int v = 0; v < 4; ++v) x[v] = Taylor<N>::variable(v, p[v]);
  return x;
}

// The metric as a jet of order N around p, for the spec with only its first
// `depth` wrappers applied.
template <int N>
TField<N, 2> metric_field_at_depth(const MetricSpec& spec, std::size_t depth, const Point& p);

namespace detail {

template <int N>
Taylor<N> lambda3_cuberoot_squared(const MetricSpec& spec, std::size_t depth, const Point& p) {
  if constexpr (N + 2 > kMaxTaylorOrder) {
    fail(ErrorCode::UnsupportedOrder, "Kahler rescaling needs base jets beyond the supported order");
  } else {
    const TField<N + 2, 2> g = metric_field_at_depth<N + 2>(spec, depth, p);
    const TField<N + 2, 2> ginv = inverse_field(g);
    const TField<N + 1, 3> gam = christoffel(g, ginv);
    const TField<N, 4> riem = riemann(g, gam);
    const TField<N, 2> gi = truncate_field<N>(ginv);
    const TField<N, 2> gt = truncate_field<N>(g);
    const TField<N, 2> ric = ricci(riem, gi);
    const Taylor<N> scal = trace(ric, gi);
    const TField<N, 4> w = weyl(riem, gt, ric, scal);
    const TField<N, 4> eps = volume_form(gt, spec.orientation);
    const TField<N, 4> wplus = self_dual_part(w, raise_last_pair(eps, gi));
    const auto ps = lambda_power_sums(wplus, gi);
    const auto roots = trace_free_cubic_roots(ps[0].value(), ps[1].value());
    const double riem_scale = std::sqrt(std::abs(inner(values(riem), values(riem), values(gi))));
    if (!(roots[2] > kLambdaZeroRel * riem_scale))
      fail(ErrorCode::ZeroLambda3, "self-dual Weyl eigenvalue lambda3 vanishes at the point");
    const double wnorm = std::sqrt(4.0 * std::max(0.0, ps[0].value()));
    if (!(2.0 * (roots[2] - roots[1]) > kGapRel * std::max(1.0, wnorm)))
      fail(ErrorCode::DegenerateEigenvalue, "lambda3 is not simple; conformal factor is not smooth");
    const Taylor<N> lam = lambda3_jet(ps, roots[2]);
    return pow(lam, 2.0 / 3.0);
  }
}

}  // namespace detail

template <int N>
TField<N, 2> metric_field_at_depth(const MetricSpec& spec, std::size_t depth, const Point& p) {
  if (depth == 0) {
    if (!in_chart(spec.base.id, spec.base.params, p))
      fail(ErrorCode::PointOutsideChart, std::string(to_string(spec.base.id)) + ": point outside chart domain");
    return catalog_metric(spec.base, coordinate_jet<N>(p));
  }
  const Wrapper& w = spec.wrappers[depth - 1];
  if (const auto* cw = std::get_if<ConformalWrapper>(&w)) {
    Taylor<N> omega2;
    if (const auto* c = std::get_if<ConstantOmega>(&cw->omega)) {
      if (!(c->c > 0.0)) fail(ErrorCode::NonPositiveConformalFactor, "constant conformal factor must be positive");
      omega2 = Taylor<N>(c->c * c->c);
    } else if (const auto* b = std::get_if<BumpOmega>(&cw->omega)) {
      const Taylor<N> om = 1.0 + b->amplitude * b->bump.evaluate(coordinate_jet<N>(p));
      if (!(om.value() > 0.0)) fail(ErrorCode::NonPositiveConformalFactor, "bump conformal factor not positive");
      omega2 = om * om;
    } else {
      omega2 = detail::lambda3_cuberoot_squared<N>(spec, depth - 1, p);
    }
    TField<N, 2> g = metric_field_at_depth<N>(spec, depth - 1, p);
    for (auto& x : g.c) x = x * omega2;
    return g;
  }
  if (const auto* dw = std::get_if<DeformationWrapper>(&w)) {
    TField<N, 2> g = metric_field_at_depth<N>(spec, depth - 1, p);
    const Taylor<N> b = dw->bump.evaluate(coordinate_jet<N>(p)) * dw->amplitude;
    for (int k = 0; k < 16; ++k)
      if (dw->h.c[k] != 0.0) g.c[k] += b * dw->h.c[k];
    return g;
  }
  const auto& pw = std::get<PullbackWrapper>(w);
  if constexpr (N + 1 > kMaxTaylorOrder) {
    fail(ErrorCode::UnsupportedOrder, "pullback needs one extra jet order");
  } else {
    // phi(p + delta) as a jet of order N + 1
    const auto x = coordinate_jet<N + 1>(p);
    const auto xi = pw.xi.evaluate(x);
    bool identity = true;  // xi vanishes to all orders outside its support
    for (const auto& c : xi)
      for (int k = 0; k < Taylor<N + 1>::size; ++k) identity = identity && c[k] == 0.0;
    if (identity) return metric_field_at_depth<N>(spec, depth - 1, p);
    std::array<Taylor<N + 1>, 4> phi;
    for (int i = 0; i < 4; ++i) phi[i] = x[i] + xi[i] * pw.s;
    Point q;
    for (int i = 0; i < 4; ++i) q[i] = phi[i].value();
    const TField<N, 2> gq = metric_field_at_depth<N>(spec, depth - 1, q);
    std::array<Taylor<N>, 4> h;
    for (int i = 0; i < 4; ++i) {
      h[i] = truncate<N>(phi[i]);
      h[i][0] = 0.0;
    }
    TField<N, 2> gc;
    for (int k = 0; k < 16; ++k) gc.c[k] = compose(gq.c[k], h);
    // dphi[i][a] = d_a phi^i
    std::array<std::array<Taylor<N>, 4>, 4> dphi;
    for (int i = 0; i < 4; ++i)
      for (int a = 0; a < 4; ++a) dphi[i][a] = derivative(phi[i], a);
    TField<N, 2> half;  // half(c, b) = g_cd dphi^d_b
    for (int c = 0; c < 4; ++c)
      for (int b = 0; b < 4; ++b)
        for (int d = 0; d < 4; ++d) half(c, b).fma(gc(c, d), dphi[d][b]);
    TField<N, 2> out;
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b) {
        Taylor<N> s;
        for (int c = 0; c < 4; ++c) s.fma(dphi[c][a], half(c, b));
        out(a, b) = s;
        out(b, a) = s;
      }
    return out;
  }
}

template <int N>
TField<N, 2> metric_field(const MetricSpec& spec, const Point& p) {
  return metric_field_at_depth<N>(spec, spec.wrappers.size(), p);
}

inline Mat4 metric_value(const MetricSpec& spec, const Point& p) { return values(metric_field<0>(spec, p)); }

// ------------------------------------------------------------ MetricJet

inline constexpr int kMaxJetOrder = 4;

// Metric components with all coordinate partials up to `order`.
struct MetricJet {
  int order = 0;
  Point point{};
  TField<kMaxJetOrder, 2> g;  // coefficients above `order` are zero

  Mat4 value() const { return values(g); }
  // d^alpha g_ab at the point; |alpha| must not exceed order
  double partial(int a, int b, const MultiIndex& alpha) const {
    int deg = alpha[0] + alpha[1] + alpha[2] + alpha[3];
    if (deg > order) fail(ErrorCode::InsufficientJetOrder, "partial beyond jet order");
    return g(a, b).partial(alpha);
  }
  // Jet of order N (N <= order) as a Taylor field.
  template <int N>
  TField<N, 2> field() const {
    if (N > order) fail(ErrorCode::InsufficientJetOrder, "jet order too low");
    return truncate_field<N>(g);
  }
};

inline MetricJet evaluate_jet(const MetricSpec& spec, const Point& p, int order) {
  if (order < 0 || order > kMaxJetOrder) fail(ErrorCode::UnsupportedOrder, "jet order must be in [0, 4]");
  MetricJet jet;
  jet.order = order;
  jet.point = p;
  auto embed = [&jet](const auto& f) {
    using F = std::decay_t<decltype(f.c[0])>;
    for (int c = 0; c < 16; ++c)
      for (int k = 0; k < F::size; ++k) jet.g.c[c][k] = f.c[c][k];
  };
  switch (order) {
    case 0: embed(metric_field<0>(spec, p)); break;
    case 1: embed(metric_field<1>(spec, p)); break;
    case 2: embed(metric_field<2>(spec, p)); break;
    case 3: embed(metric_field<3>(spec, p)); break;
    default: embed(metric_field<4>(spec, p)); break;
  }
  return jet;
}

inline MetricJet evaluate_jet(const MetricSpec& spec, const ChartPoint& p, int order) {
  if (p.chart != spec.chart()) fail(ErrorCode::PointOutsideChart, "point belongs to a different chart");
  return evaluate_jet(spec, p.coords, order);
}

inline MetricSpec conformal_wrap(MetricSpec spec, ScalarFieldSpec omega) {
  if (const auto* c = std::get_if<ConstantOmega>(&omega))
    if (!(c->c > 0.0)) fail(ErrorCode::NonPositiveConformalFactor, "constant conformal factor must be positive");
  if (const auto* b = std::get_if<BumpOmega>(&omega))
    if (!(b->amplitude > -1.0)) fail(ErrorCode::NonPositiveConformalFactor, "1 + amplitude * bump must stay positive");
  spec.wrappers.push_back(ConformalWrapper{omega});
  return spec;
}

inline MetricSpec deform(MetricSpec spec, const BumpProfile& bump, const Mat4& h, double amplitude) {
  spec.wrappers.push_back(DeformationWrapper{bump, h, amplitude});
  return spec;
}

inline MetricSpec pullback(MetricSpec spec, const VectorFieldSpec& xi, double s) {
  spec.wrappers.push_back(PullbackWrapper{xi, s});
  return spec;
}

// ---------------------------------------------------------------- curves

struct MassFamily {
  double dm = 0.1;
};
struct GaugeFlow {
  VectorFieldSpec xi;
};
struct ConformalBumpFamily {
  BumpProfile bump;
};
using CurveFamily = std::variant<MassFamily, GaugeFlow, ConformalBumpFamily>;

struct CurveSpec {
  MetricSpec base;
  CurveFamily family;
  double h_s = 1e-3;       // s-step for derivatives along the curve
  double s_validity = 0.5;  // |s| for which members are defined
};

inline MetricSpec curve_member(const CurveSpec& curve, double s) {
  if (!(std::abs(s) <= curve.s_validity)) fail(ErrorCode::StencilOutsideValidity, "s outside curve validity");
  if (s == 0.0) return curve.base;
  MetricSpec m = curve.base;
  if (const auto* mf = std::get_if<MassFamily>(&curve.family)) {
    if (m.base.id != CatalogId::EuclideanSchwarzschild)
      fail(ErrorCode::InvalidSpec, "MassFamily needs a EuclideanSchwarzschild base");
    m.base.params[0] += s * mf->dm;
    if (!(m.base.params[0] > 0.0)) fail(ErrorCode::StencilOutsideValidity, "mass must stay positive");
    return m;
  }
  if (const auto* gf = std::get_if<GaugeFlow>(&curve.family)) return pullback(m, gf->xi, s);
  const auto& cb = std::get<ConformalBumpFamily>(curve.family);
  return conformal_wrap(m, BumpOmega{cb.bump, s});
}

inline MetricJet curve_jet(const CurveSpec& curve, double s, const Point& p, int order) {
  return evaluate_jet(curve_member(curve, s), p, order);
}

// Kahler rescaling g -> lambda3^{2/3} g.
inline MetricSpec kahler_wrap(MetricSpec spec) { return conformal_wrap(std::move(spec), Lambda3Omega{}); }

// ------------------------------------------------------------ helpers

// Coordinate length scales at p for finite-difference steps.
inline Point coordinate_scales(const MetricSpec& spec, const Point& p) {
  switch (spec.base.id) {
    case CatalogId::EuclideanSchwarzschild: return {4.0 * spec.base.param(0), p[1], 1.0, 1.0};
    case CatalogId::TaubNUT:
    case CatalogId::EguchiHanson: return {p[0], 1.0, 1.0, 1.0};
    default: return {1.0, 1.0, 1.0, 1.0};
  }
}


// Non-Einstein, non-conformally-flat reference metric: flat space plus a
// compactly supported anisotropic bump deformation (support radius 2).
inline MetricSpec asymmetric_bump_metric(int orientation = 1, double amplitude = 0.3) {
  BumpProfile bump;
  bump.widths = {2.0, 2.0, 2.0, 2.0};
  Mat4 h;
  const double rows[4][4] = {{1.0, 0.3, 0.0, 0.1}, {0.3, -0.5, 0.2, 0.0}, {0.0, 0.2, 0.4, -0.3}, {0.1, 0.0, -0.3, -0.2}};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) h(a, b) = rows[a][b];
  return deform(make_spec(CatalogId::Flat, {}, orientation), bump, h, amplitude);
}

}  // namespace sdw

#endif  // SDW_GEOMETRY_HPP
