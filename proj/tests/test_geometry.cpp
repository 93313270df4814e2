#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sdw/curvature.hpp"
#include "sdw/kahler.hpp"

using namespace sdw;
using enum CatalogId;

namespace {

constexpr double kPi = 3.14159265358979323846;

template <class F>
void expect_code(ErrorCode code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

Point random_point(std::mt19937_64& rng, const Point& lo, const Point& hi) {
  Point p;
  for (int v = 0; v < 4; ++v) p[v] = std::uniform_real_distribution<double>(lo[v], hi[v])(rng);
  return p;
}

}  // namespace

// ------------------------------------------------------------ Taylor jets

TEST(Taylor, ComposedFunctionsMatchClosedFormDerivatives) {
  const Point p{0.3, -0.2, 0.5, 0.1};
  const auto x = coordinate_jet<4>(p);
  const Taylor<4> f = exp(sin(x[0])) * x[1];
  // d^3/dx0^3 exp(sin x) = e^{sin x} (cos^3 x - 3 sin x cos x - cos x)
  const double s = std::sin(p[0]), c = std::cos(p[0]), e = std::exp(s);
  EXPECT_NEAR(f.partial({3, 0, 0, 0}), p[1] * e * (c * c * c - 3 * s * c - c), 1e-13);
  EXPECT_NEAR(f.partial({2, 1, 0, 0}), e * (c * c - s), 1e-13);
  const Taylor<4> r = reciprocal(x[2] * x[2] + 1.0);
  const double u = p[2];
  EXPECT_NEAR(r.partial({0, 0, 2, 0}), (6 * u * u - 2) / std::pow(u * u + 1, 3), 1e-13);
  const Taylor<4> q = pow(x[3] + 2.0, 1.5);
  EXPECT_NEAR(q.partial({0, 0, 0, 4}), 1.5 * 0.5 * -0.5 * -1.5 * std::pow(p[3] + 2.0, -2.5), 1e-13);
}

TEST(Taylor, DerivativeAndTruncateCommute) {
  const auto x = coordinate_jet<5>({0.1, 0.2, 0.3, 0.4});
  const Taylor<5> f = cos(x[0] * x[1]) + log(x[2] + 2.0) * x[3];
  const Taylor<3> a = truncate<3>(derivative(f, 2));
  const Taylor<3> b = derivative(truncate<4>(f), 2);
  for (int k = 0; k < Taylor<3>::size; ++k) EXPECT_DOUBLE_EQ(a[k], b[k]);
}

// ------------------------------------------------------------ catalog

TEST(Catalog, FlatIsIdentityWithVanishingPartials) {
  const MetricJet j = evaluate_jet(make_spec(Flat), {0.3, -1.0, 2.0, 0.5}, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      EXPECT_EQ(j.g(a, b).value(), a == b ? 1.0 : 0.0);
      for (int k = 1; k < Taylor<4>::size; ++k) EXPECT_EQ(j.g(a, b)[k], 0.0);
    }
}

TEST(Catalog, SchwarzschildComponentsMatchSymbolicOracle) {
  // tests/oracles/schwarzschild_oracle.py, r = 4, theta = 1.1
  const Mat4 g = metric_value(make_spec(EuclideanSchwarzschild, {1.0}), {0.3, 4.0, 1.1, 0.4});
  EXPECT_NEAR(g(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(g(1, 1), 2.0, 1e-15);
  EXPECT_NEAR(g(2, 2), 16.0, 1e-14);
  EXPECT_NEAR(g(3, 3), 12.708008938042766, 1e-13);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (a != b) EXPECT_EQ(g(a, b), 0.0);
}

TEST(Catalog, ChartDomainsAndParameterValidation) {
  EXPECT_TRUE(in_chart(EuclideanSchwarzschild, {1.0}, {0.0, 2.5, 1.0, 0.0}));
  EXPECT_FALSE(in_chart(EuclideanSchwarzschild, {1.0}, {0.0, 1.5, 1.0, 0.0}));
  EXPECT_FALSE(in_chart(ProductS2xS2, {1.0, 1.0}, {0.0, 0.0, 1.0, 0.0}));
  expect_code(ErrorCode::PointOutsideChart,
              [] { evaluate_jet(make_spec(EuclideanSchwarzschild, {1.0}), {0.0, 1.9, 1.0, 0.0}, 2); });
  expect_code(ErrorCode::InvalidSpec, [] { make_spec(TaubNUT, {-1.0}); });
  expect_code(ErrorCode::InvalidSpec, [] { make_spec(Flat, {}, 0); });
  expect_code(ErrorCode::UnsupportedOrder, [] { evaluate_jet(make_spec(Flat), {0, 0, 0, 0}, 5); });
  const MetricJet j = evaluate_jet(make_spec(Flat), {0, 0, 0, 0}, 1);
  expect_code(ErrorCode::InsufficientJetOrder, [&] { j.partial(0, 0, {2, 0, 0, 0}); });
}

// ------------------------------------------------------------ conformal wrappers

TEST(Conformal, ConstantFactorScalesFlatExactly) {
  const MetricJet j = evaluate_jet(conformal_wrap(make_spec(Flat), ConstantOmega{1.7}), {0.1, 0.2, 0.3, 0.4}, 3);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      EXPECT_DOUBLE_EQ(j.g(a, b).value(), a == b ? 1.7 * 1.7 : 0.0);
      for (int k = 1; k < Taylor<3>::size; ++k) EXPECT_EQ(j.g(a, b)[k], 0.0);
    }
  EXPECT_NEAR(curvature_pack(conformal_wrap(make_spec(Flat), ConstantOmega{1.7}), {0.1, 0.2, 0.3, 0.4}).scalar, 0.0,
              1e-15);
}

TEST(Conformal, UnitFactorLeavesJetsUnchanged) {
  const MetricSpec base = make_spec(EuclideanSchwarzschild, {1.0});
  const Point p{0.3, 5.0, 1.1, 0.4};
  const MetricJet a = evaluate_jet(base, p, 4);
  const MetricJet b = evaluate_jet(conformal_wrap(base, ConstantOmega{1.0}), p, 4);
  for (int c = 0; c < 16; ++c)
    for (int k = 0; k < Taylor<4>::size; ++k) EXPECT_DOUBLE_EQ(a.g.c[c][k], b.g.c[c][k]);
}

TEST(Conformal, NonPositiveFactorsAreRejected) {
  expect_code(ErrorCode::NonPositiveConformalFactor, [] { conformal_wrap(make_spec(Flat), ConstantOmega{0.0}); });
  BumpProfile b;
  expect_code(ErrorCode::NonPositiveConformalFactor, [&] { conformal_wrap(make_spec(Flat), BumpOmega{b, -1.5}); });
}

// The lambda3^{1/3} rescaling jet against central differences of Omega^2 g.
TEST(Conformal, KahlerRescalingJetMatchesFiniteDifferences) {
  const MetricSpec base = make_spec(EuclideanSchwarzschild, {1.0});
  const MetricSpec hat = kahler_wrap(base);
  const Point p{0.3, 5.0, 1.1, 0.4};
  const MetricJet j = evaluate_jet(hat, p, 1);
  auto ghat = [&](const Point& q) { return metric_value(base, q) * std::pow(lambda3_at(base, q), 2.0 / 3.0); };
  std::array<double, 2> err{};
  double scale = 0.0;
  for (int level = 0; level < 2; ++level) {
    const double h = 2e-3 / (1 << level);
    for (int v = 0; v < 4; ++v) {
      Point qp = p, qm = p;
      qp[v] += h;
      qm[v] -= h;
      const Mat4 fd = (ghat(qp) - ghat(qm)) * (0.5 / h);
      MultiIndex e{};
      e[v] = 1;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          err[level] = std::max(err[level], std::abs(fd(a, b) - j.partial(a, b, e)));
          scale = std::max(scale, std::abs(j.partial(a, b, e)));
        }
    }
  }
  EXPECT_LT(err[1] / scale, 1e-5);
  EXPECT_GE(std::log2(err[0] / err[1]), 1.8);
}

// ------------------------------------------------------------ curves

TEST(Curves, AnchoredAtBaseAndMassShift) {
  CurveSpec c{make_spec(EuclideanSchwarzschild, {1.0}), MassFamily{0.1}};
  c.s_validity = 2.0;
  const Point p{0.3, 5.0, 1.1, 0.4};
  const MetricJet a = curve_jet(c, 0.0, p, 2), b = evaluate_jet(c.base, p, 2);
  for (int k = 0; k < 16; ++k) EXPECT_EQ(a.g.c[k][0], b.g.c[k][0]);
  const Mat4 m1 = curve_jet(c, 1.0, p, 0).value();
  const Mat4 ref = metric_value(make_spec(EuclideanSchwarzschild, {1.1}), p);
  EXPECT_LT(max_abs_diff(m1, ref), 1e-15);
  c.s_validity = 0.5;
  expect_code(ErrorCode::StencilOutsideValidity, [&] { curve_member(c, 0.6); });
  CurveSpec bad{make_spec(Flat), MassFamily{}};
  expect_code(ErrorCode::InvalidSpec, [&] { curve_member(bad, 0.1); });
}

// Pullback invariance: |Riem|^2 of the flowed metric at x equals the base
// value at x + s xi(x).
TEST(Curves, GaugeFlowPreservesCurvatureInvariants) {
  const MetricSpec base = make_spec(EuclideanSchwarzschild, {1.0});
  VectorFieldSpec xi;
  xi.bump.center = {0.0, 6.0, kPi / 2, 0.0};
  xi.bump.widths = {1.5, 1.5, 1.5, 1.5};
  xi.v = {0.2, 0.3, -0.1, 0.25};
  CurveSpec c{base, GaugeFlow{xi}};
  const double s = 0.05;
  for (const Point& p : {Point{0.2, 6.1, 1.4, 0.2}, Point{-0.3, 5.6, 1.8, -0.4}}) {
    const double kflow = riemann_norm(curvature_pack(curve_member(c, s), p));
    const auto d = xi.evaluate<double>(p);
    Point q = p;
    for (int v = 0; v < 4; ++v) q[v] += s * d[v];
    const double kbase = riemann_norm(curvature_pack(base, q));
    EXPECT_NEAR(kflow / kbase, 1.0, 1e-12);
  }
}

// ------------------------------------------------------------ curvature

TEST(Curvature, FlatVanishes) {
  const CurvaturePack c = curvature_pack(make_spec(Flat), {0.1, 0.2, 0.3, 0.4});
  EXPECT_EQ(max_abs(c.riemann), 0.0);
}

TEST(Curvature, SchwarzschildIsRicciFlat) {
  const CurvaturePack c = curvature_pack(make_spec(EuclideanSchwarzschild, {1.0}), {0.3, 5.0, 1.1, 0.4});
  const double scale = riemann_norm(c);
  EXPECT_LT(max_abs(c.trace_free_ricci) / scale, 1e-10);
  EXPECT_LT(std::abs(c.scalar) / scale, 1e-10);
}

TEST(Curvature, RoundSphereHasConstantCurvature) {
  const double a = 1.3;
  const CurvaturePack c = curvature_pack(make_spec(Sphere4, {a}), {0.3, 0.2, 0.7, 0.4});
  EXPECT_NEAR(c.scalar, 12.0 / (a * a), 1e-12);
  EXPECT_LT(max_abs(c.weyl), 1e-12);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
          EXPECT_NEAR(c.riemann(i, j, k, l), (c.g(i, k) * c.g(j, l) - c.g(i, l) * c.g(j, k)) / (a * a), 1e-12);
}

class CurvatureProperties : public ::testing::TestWithParam<int> {};

// Algebraic symmetries, first and second Bianchi identities on random points of
// a generic metric and of the catalog.
TEST_P(CurvatureProperties, SymmetriesAndBianchi) {
  std::mt19937_64 rng(7 + GetParam());
  const MetricSpec specs[] = {asymmetric_bump_metric(), make_spec(EuclideanSchwarzschild, {1.0}),
                              make_spec(TaubNUT, {1.0}, -1)};
  const MetricSpec& spec = specs[GetParam()];
  for (int trial = 0; trial < 10; ++trial) {
    const Point p = GetParam() == 0   ? random_point(rng, {-0.8, -0.8, -0.8, -0.8}, {0.8, 0.8, 0.8, 0.8})
                    : GetParam() == 1 ? random_point(rng, {0, 3, 0.3, 0}, {6, 20, 2.8, 6})
                                      : random_point(rng, {1.5, 0.3, 0, 0}, {10, 2.8, 6, 12});
    const CurvaturePack c = curvature_pack(spec, p, true);
    const double s = std::max(max_abs(c.riemann), 1e-300);
    const DTensor<4>& R = c.riemann;
    double sym = 0.0, b1 = 0.0, b2 = 0.0, dscale = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int cc = 0; cc < 4; ++cc)
          for (int d = 0; d < 4; ++d) {
            sym = std::max({sym, std::abs(R(a, b, cc, d) + R(b, a, cc, d)), std::abs(R(a, b, cc, d) - R(cc, d, a, b))});
            b1 = std::max(b1, std::abs(R(a, b, cc, d) + R(a, cc, d, b) + R(a, d, b, cc)));
          }
    // second Bianchi through the contracted form nabla^a W_abcd from nabla W
    ASSERT_TRUE(c.nabla_weyl.has_value());
    const DTensor<5>& nw = *c.nabla_weyl;
    for (int e = 0; e < 4; ++e)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          for (int cc = 0; cc < 4; ++cc)
            for (int d = 0; d < 4; ++d) dscale = std::max(dscale, std::abs(nw(e, a, b, cc, d)));
    // differential Bianchi holds for nabla R; for Ricci-flat metrics R = W
    if (GetParam() > 0)
      for (int e = 0; e < 4; ++e)
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            for (int cc = 0; cc < 4; ++cc)
              for (int d = 0; d < 4; ++d)
                b2 = std::max(b2, std::abs(nw(e, a, b, cc, d) + nw(a, b, e, cc, d) + nw(b, e, a, cc, d)));
    EXPECT_LT(sym / s, 1e-12);
    EXPECT_LT(b1 / s, 1e-12);
    EXPECT_LT(b2 / std::max(dscale, 1e-300), 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Metrics, CurvatureProperties, ::testing::Values(0, 1, 2));

// (nabla_a nabla_b - nabla_b nabla_a) v_c = R_abc^d v_d at 100 points.
TEST(Curvature, CommutatorConvention) {
  std::mt19937_64 rng(11);
  const MetricSpec spec = asymmetric_bump_metric();
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Point p = random_point(rng, {-0.8, -0.8, -0.8, -0.8}, {0.8, 0.8, 0.8, 0.8});
    const TField<3, 2> g = metric_field<3>(spec, p);
    const TField<2, 3> gam = christoffel(g, inverse_field(g));
    const auto x = coordinate_jet<2>(p);
    TField<2, 1> v;
    for (int c = 0; c < 4; ++c) v(c) = sin(x[c] * (0.7 + 0.1 * c) + x[(c + 1) % 4]) + x[(c + 2) % 4] * x[c];
    const DTensor<3> nn = values(covariant_derivative(covariant_derivative(v, gam), gam));  // (a, b, c)
    const CurvaturePack cp = curvature_pack(spec, p);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) {
          double rhs = 0.0;
          for (int d = 0; d < 4; ++d)
            for (int e = 0; e < 4; ++e) rhs += cp.riemann(a, b, c, e) * cp.ginv(e, d) * values(v)(d);
          worst = std::max(worst, std::abs(nn(a, b, c) - nn(b, a, c) - rhs));
        }
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Curvature, MetricAndVolumeFormAreParallel) {
  for (const MetricSpec& spec : {asymmetric_bump_metric(), make_spec(EguchiHanson, {1.0}, 1)}) {
    const Point p = spec.base.id == Flat ? Point{0.2, -0.3, 0.1, 0.4} : Point{2.5, 1.1, 0.4, 0.2};
    const TField<2, 2> g = metric_field<2>(spec, p);
    const TField<2, 2> gi = inverse_field(g);
    const TField<1, 3> gam = christoffel(g, gi);
    EXPECT_LT(max_abs(values(covariant_derivative(g, gam))), 1e-13);
    EXPECT_LT(max_abs(values(covariant_derivative(volume_form(g, 1), gam))), 1e-12);
  }
}

TEST(Curvature, DerivativePackRequiresOrderThree) {
  const MetricJet j = evaluate_jet(make_spec(Flat), {0, 0, 0, 0}, 2);
  expect_code(ErrorCode::InsufficientJetOrder, [&] { curvature_pack(j, true); });
  const MetricJet j1 = evaluate_jet(make_spec(Flat), {0, 0, 0, 0}, 1);
  expect_code(ErrorCode::InsufficientJetOrder, [&] { curvature_pack(j1, false); });
}
