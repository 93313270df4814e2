#ifndef SDW_CURVATURE_HPP
#define SDW_CURVATURE_HPP

// Curvature of a metric jet: Riemann, Ricci, scalar, Weyl, trace-free Ricci,
// and the first covariant derivatives of Weyl and trace-free Ricci.

#include <optional>

#include "sdw/errors.hpp"
#include "sdw/fields.hpp"
#include "sdw/geometry.hpp"
#include "sdw/tensor.hpp"

namespace sdw {

// Curvature as jets of order N - 2 around the point of a metric jet of order N.
template <int N>
struct CurvatureFields {
  TField<N, 2> g;
  TField<N, 2> ginv;
  TField<N - 1, 3> gamma;
  TField<N - 2, 4> riemann;
  TField<N - 2, 2> ricci;
  Taylor<N - 2> scalar;
  TField<N - 2, 4> weyl;
  TField<N - 2, 2> trace_free_ricci;
};

template <int N>
CurvatureFields<N> curvature_fields(const TField<N, 2>& g) {
  static_assert(N >= 2);
  CurvatureFields<N> c;
  c.g = g;
  c.ginv = inverse_field(g);
  c.gamma = christoffel(g, c.ginv);
  c.riemann = riemann(g, c.gamma);
  const auto gi = truncate_field<N - 2>(c.ginv);
  const auto gt = truncate_field<N - 2>(g);
  c.ricci = ricci(c.riemann, gi);
  c.scalar = trace(c.ricci, gi);
  c.weyl = weyl(c.riemann, gt, c.ricci, c.scalar);
  c.trace_free_ricci = trace_free(c.ricci, gt, c.scalar);
  return c;
}

struct CurvaturePack {
  Mat4 g;
  Mat4 ginv;
  DTensor<3> gamma;  // Gamma^k_ij as gamma(k, i, j)
  DTensor<4> riemann;
  Mat4 ricci;
  double scalar = 0.0;
  DTensor<4> weyl;
  Mat4 trace_free_ricci;
  std::optional<DTensor<5>> nabla_weyl;  // (e, a, b, c, d) = nabla_e W_abcd
  std::optional<DTensor<3>> nabla_E;     // (a, b, c) = nabla_a E_bc
};

template <int N>
CurvaturePack curvature_pack(const TField<N, 2>& g, bool with_derivatives) {
  if constexpr (N < 2) {
    fail(ErrorCode::InsufficientJetOrder, "curvature needs a jet of order >= 2");
  } else {
    const CurvatureFields<N> f = curvature_fields<N>(g);
    CurvaturePack p;
    p.g = values(g);
    p.ginv = values(f.ginv);
    p.gamma = values(f.gamma);
    p.riemann = values(f.riemann);
    p.ricci = values(f.ricci);
    p.scalar = f.scalar.value();
    p.weyl = values(f.weyl);
    p.trace_free_ricci = values(f.trace_free_ricci);
    if (with_derivatives) {
      if constexpr (N < 3) {
        fail(ErrorCode::InsufficientJetOrder, "covariant curvature derivatives need a jet of order >= 3");
      } else {
        p.nabla_weyl = values(covariant_derivative(f.weyl, f.gamma));
        p.nabla_E = values(covariant_derivative(f.trace_free_ricci, f.gamma));
      }
    }
    return p;
  }
}

inline CurvaturePack curvature_pack(const MetricJet& jet, bool with_derivatives = false) {
  if (jet.order < 2) fail(ErrorCode::InsufficientJetOrder, "curvature needs a jet of order >= 2");
  if (with_derivatives && jet.order < 3)
    fail(ErrorCode::InsufficientJetOrder, "covariant curvature derivatives need a jet of order >= 3");
  if (jet.order == 2) return curvature_pack<2>(jet.field<2>(), false);
  return curvature_pack<3>(jet.field<3>(), with_derivatives);
}

inline CurvaturePack curvature_pack(const MetricSpec& spec, const Point& p, bool with_derivatives = false) {
  if (with_derivatives) return curvature_pack<3>(metric_field<3>(spec, p), true);
  return curvature_pack<2>(metric_field<2>(spec, p), false);
}

// |T|_g of the Riemann tensor, the reference scale for curvature tolerances.
inline double riemann_norm(const CurvaturePack& p) { return norm(p.riemann, p.ginv); }

// Covariant derivative of a covariant tensor field given as a jet of order
// >= 1, evaluated at the point of the metric jet.
template <int N, int R>
DTensor<R + 1> covariant_derivative(const TField<N, R>& field, const MetricJet& jet) {
  static_assert(N >= 1, "field must supply first partials");
  if (jet.order < 1) fail(ErrorCode::InsufficientJetOrder, "metric jet must supply first partials");
  const TField<1, 2> g = jet.field<1>();
  const TField<1, 2> gi = inverse_field(g);
  const TField<0, 3> gam = christoffel(g, gi);
  return values(covariant_derivative(truncate_field<1>(field), gam));
}

}  // namespace sdw

#endif  // SDW_CURVATURE_HPP
