#ifndef SDW_WEITZENBOCK_HPP
#define SDW_WEITZENBOCK_HPP

// Weitzenboeck identities for 2-forms and 2-form-valued pair fields, with the
// Laplace-de Rham side built from d and d* and the other side from the rough
// Laplacian plus curvature terms.

#include <algorithm>

#include "sdw/curvature.hpp"
#include "sdw/forms.hpp"
#include "sdw/geometry.hpp"

namespace sdw {

struct IdentityResidual {
  double residual = 0.0;  // max component of |lhs - rhs|
  double scale = 0.0;     // largest participating component
  double relative() const { return residual / std::max(scale, 1e-300); }
};

namespace detail {

template <int R>
void widen(double& scale, const DTensor<R>& t) {
  scale = std::max(scale, max_abs(t));
}

inline Mat4 mixed_ricci(const Mat4& ric, const Mat4& ginv) { return matmul(ric, ginv); }  // (a, c) = R_a^c

}  // namespace detail

// Laplace-de Rham minus (-box F - R_ab^cd F_cd - 2 R_[a^c F_b]c) at the point.
template <int N, int M, int K>
IdentityResidual two_form_weitzenbock(const TField<N, 2>& f, const TField<M, 3>& gamma, const TField<K, 2>& ginv_f,
                                      const DTensor<4>& riem, const Mat4& ric) {
  static_assert(N == 2, "test 2-forms are order-2 jets");
  const Mat4 ginv = values(ginv_f);
  const Mat4 lhs = values(laplace_de_rham(f, gamma, ginv_f));
  const Mat4 box = values(rough_laplacian(f, gamma, ginv_f));
  const Mat4 fv = values(f);
  const Mat4 fup = raise_all(fv, ginv);
  const Mat4 rc = detail::mixed_ricci(ric, ginv);
  Mat4 curv1, curv2;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double s1 = 0.0, s2 = 0.0;
      for (int c = 0; c < 4; ++c) {
        for (int d = 0; d < 4; ++d) s1 += riem(a, b, c, d) * fup(c, d);
        s2 += rc(a, c) * fv(b, c) - rc(b, c) * fv(a, c);
      }
      curv1(a, b) = s1;
      curv2(a, b) = s2;
    }
  const Mat4 rhs = box * -1.0 - curv1 - curv2;
  IdentityResidual r;
  r.residual = max_abs_diff(lhs, rhs);
  detail::widen(r.scale, lhs);
  detail::widen(r.scale, box);
  detail::widen(r.scale, curv1);
  detail::widen(r.scale, curv2);
  return r;
}

// Laplace-de Rham on Z_ab^cd minus
// (-box Z + 2 R_[a^e Z_|e|b]^cd - R_ab^ef Z_ef^cd + 4 R_[a^e_|f|^[c Z_|e|b]^|f|d]).
template <int N, int M, int K>
IdentityResidual pair_weitzenbock(const TField<N, 4>& z, const TField<M, 3>& gamma, const TField<K, 2>& ginv_f,
                                  const DTensor<4>& riem, const Mat4& ric) {
  static_assert(N == 2, "test pair fields are order-2 jets");
  const Mat4 ginv = values(ginv_f);
  const DTensor<4> lhs = values(laplace_de_rham(z, gamma, ginv_f));
  const DTensor<4> box = values(rough_laplacian(z, gamma, ginv_f));
  const DTensor<4> zv = values(z);
  const Mat4 rc = detail::mixed_ricci(ric, ginv);
  const DTensor<4> rup = raise_last_pair(riem, ginv);  // R_ab^ef
  // zr(e, b, f, d) = Z_eb^f_d ; rr(a, e, f, c) = R_a^e_fc
  DTensor<4> zr, rr;
  for (int e = 0; e < 4; ++e)
    for (int b = 0; b < 4; ++b)
      for (int f = 0; f < 4; ++f)
        for (int d = 0; d < 4; ++d) {
          double s = 0.0, t = 0.0;
          for (int n = 0; n < 4; ++n) {
            s += ginv(f, n) * zv(e, b, n, d);
            t += ginv(b, n) * riem(e, n, f, d);
          }
          zr(e, b, f, d) = s;
          rr(e, b, f, d) = t;
        }
  DTensor<4> t1, t2, x;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double s1 = 0.0, s2 = 0.0, s3 = 0.0;
          for (int e = 0; e < 4; ++e) {
            s1 += rc(a, e) * zv(e, b, c, d) - rc(b, e) * zv(e, a, c, d);
            for (int f = 0; f < 4; ++f) {
              s2 += rup(a, b, e, f) * zv(e, f, c, d);
              s3 += rr(a, e, f, c) * zr(e, b, f, d);
            }
          }
          t1(a, b, c, d) = s1;
          t2(a, b, c, d) = s2;
          x(a, b, c, d) = s3;
        }
  DTensor<4> t3;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) t3(a, b, c, d) = x(a, b, c, d) - x(b, a, c, d) - x(a, b, d, c) + x(b, a, d, c);
  const DTensor<4> rhs = box * -1.0 + t1 - t2 + t3;
  IdentityResidual r;
  r.residual = max_abs_diff(lhs, rhs);
  detail::widen(r.scale, lhs);
  detail::widen(r.scale, box);
  detail::widen(r.scale, t1);
  detail::widen(r.scale, t2);
  detail::widen(r.scale, t3);
  return r;
}

// Laplace-de Rham of a self-dual (on the leading pair) field minus 2 (d d* T)^+.
template <int N, int R, int M, int K>
IdentityResidual self_dual_laplacian(const TField<N, R>& t_plus, const TField<M, 3>& gamma, const TField<K, 2>& ginv_f,
                                     const DTensor<4>& eps_up) {
  const DTensor<R> lhs = values(laplace_de_rham(t_plus, gamma, ginv_f));
  const DTensor<R> ddstar = values(d_codifferential(t_plus, gamma, ginv_f));
  const DTensor<R> rhs = self_dual_part(ddstar, eps_up) * 2.0;
  IdentityResidual r;
  r.residual = max_abs_diff(lhs, rhs);
  detail::widen(r.scale, lhs);
  detail::widen(r.scale, ddstar);
  return r;
}

struct WeitzenbockReport {
  IdentityResidual two_form;   // 2-form identity
  IdentityResidual pair_form;  // 2-form-valued pair identity
};

inline WeitzenbockReport weitzenbock_check(const MetricSpec& spec, const Point& p, const AnalyticTwoForm& f,
                                           const AnalyticPairField& z) {
  const CurvatureFields<2> cf = curvature_fields<2>(metric_field<2>(spec, p));
  const auto x = coordinate_jet<2>(p);
  const DTensor<4> riem = values(cf.riemann);
  const Mat4 ric = values(cf.ricci);
  return {two_form_weitzenbock(f.evaluate<2>(x), cf.gamma, cf.ginv, riem, ric),
          pair_weitzenbock(z.evaluate<2>(x), cf.gamma, cf.ginv, riem, ric)};
}

// Self-dual Weyl tensor as a jet of order N - 2 from a metric jet of order N.
template <int N>
TField<N - 2, 4> weyl_plus_field(const CurvatureFields<N>& cf, int orientation) {
  const TField<N - 2, 2> g = truncate_field<N - 2>(cf.g);
  const TField<N - 2, 2> gi = truncate_field<N - 2>(cf.ginv);
  return self_dual_part(cf.weyl, raise_last_pair(volume_form(g, orientation), gi));
}

// The pair identity with Z = W+ of the metric itself.
inline IdentityResidual weitzenbock_check_weyl_plus(const MetricSpec& spec, const Point& p) {
  const CurvatureFields<4> cf = curvature_fields<4>(metric_field<4>(spec, p));
  return pair_weitzenbock(weyl_plus_field(cf, spec.orientation), cf.gamma, cf.ginv, values(cf.riemann),
                          values(cf.ricci));
}

struct SelfDualLaplacianReport {
  IdentityResidual two_form;   // on F+ = (beta + *beta) / 2
  IdentityResidual pair_form;  // on Z+ = (Z + *Z) / 2
};

inline SelfDualLaplacianReport sd_laplacian_check(const MetricSpec& spec, const Point& p, const AnalyticTwoForm& beta,
                                                  const AnalyticPairField& z) {
  const CurvatureFields<2> cf = curvature_fields<2>(metric_field<2>(spec, p));
  const auto x = coordinate_jet<2>(p);
  const TField<2, 4> eps_up = raise_last_pair(volume_form(cf.g, spec.orientation), cf.ginv);
  const DTensor<4> eps_v = values(eps_up);
  return {self_dual_laplacian(self_dual_part(beta.evaluate<2>(x), eps_up), cf.gamma, cf.ginv, eps_v),
          self_dual_laplacian(self_dual_part(z.evaluate<2>(x), eps_up), cf.gamma, cf.ginv, eps_v)};
}

}  // namespace sdw

#endif  // SDW_WEITZENBOCK_HPP
