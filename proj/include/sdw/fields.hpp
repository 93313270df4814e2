#ifndef SDW_FIELDS_HPP
#define SDW_FIELDS_HPP

// Tensor calculus on metric jets. Every routine is generic over the scalar
// type (double at a point, or Taylor<N> for a jet around a point) unless it
// differentiates, in which case it consumes a Taylor<N> field and returns a
// Taylor<N-1> field.
//
// Curvature convention: (nabla_a nabla_b - nabla_b nabla_a) v_c = R_abc^d v_d,
// R_ac = R_abc^b, which for the round sphere gives R_abcd = K(g_ac g_bd - g_ad g_bc).

#include <array>
#include <cmath>

#include "sdw/errors.hpp"
#include "sdw/taylor.hpp"
#include "sdw/tensor.hpp"

namespace sdw {

// acc += a * b for either scalar kind.
inline void mac(double& acc, double a, double b) { acc += a * b; }
template <int N>
void mac(Taylor<N>& acc, const Taylor<N>& a, const Taylor<N>& b) {
  acc.fma(a, b);
}

template <class S>
S det_generic(const Tensor<S, 2>& m) {
  auto d2 = [&](int r0, int r1, int c0, int c1) { return m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0); };
  const S s0 = d2(0, 1, 0, 1), s1 = d2(0, 1, 0, 2), s2 = d2(0, 1, 0, 3);
  const S s3 = d2(0, 1, 1, 2), s4 = d2(0, 1, 1, 3), s5 = d2(0, 1, 2, 3);
  const S c5 = d2(2, 3, 2, 3), c4 = d2(2, 3, 1, 3), c3 = d2(2, 3, 1, 2);
  const S c2 = d2(2, 3, 0, 3), c1 = d2(2, 3, 0, 2), c0 = d2(2, 3, 0, 1);
  return s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
}

// Inverse of a symmetric Taylor matrix by Newton iteration X <- X (2 - A X),
// which doubles the number of correct orders per step.
template <int N>
TField<N, 2> inverse_field(const TField<N, 2>& a) {
  Mat4 a0 = values(a), x0;
  if (!invert4(a0, x0)) fail(ErrorCode::DegenerateMetric, "singular metric");
  TField<N, 2> x;
  for (int k = 0; k < 16; ++k) x.c[k] = Taylor<N>(x0.c[k]);
  for (int correct = 1; correct <= N; correct *= 2) {
    TField<N, 2> ax;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) ax(i, j).fma(a(i, k), x(k, j));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) ax(i, j) = (i == j ? 2.0 : 0.0) - ax(i, j);
    TField<N, 2> nx;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) nx(i, j).fma(x(i, k), ax(k, j));
    x = nx;
  }
  return x;
}

inline Mat4 inverse_field(const Mat4& a) {
  Mat4 x;
  if (!invert4(a, x)) fail(ErrorCode::DegenerateMetric, "singular metric");
  return x;
}

// epsilon_abcd = orientation * sqrt(det g) [abcd]
template <class S>
Tensor<S, 4> volume_form(const Tensor<S, 2>& g, int orientation) {
  using std::sqrt;
  const S vol = sqrt(det_generic(g)) * static_cast<double>(orientation);
  Tensor<S, 4> e;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          const int s = levi_civita(a, b, c, d);
          if (s != 0) e(a, b, c, d) = vol * static_cast<double>(s);
        }
  return e;
}

// Gamma(k, i, j) = Gamma^k_ij
template <int N>
TField<N - 1, 3> christoffel(const TField<N, 2>& g, const TField<N, 2>& ginv) {
  std::array<TField<N - 1, 2>, 4> dg;
  for (int v = 0; v < 4; ++v) dg[v] = partial_field(g, v);
  TField<N - 1, 2> gi = truncate_field<N - 1>(ginv);
  TField<N - 1, 3> first;  // Gamma_{l ij}
  for (int l = 0; l < 4; ++l)
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        Taylor<N - 1> t = dg[i](l, j) + dg[j](l, i) - dg[l](i, j);
        t *= 0.5;
        first(l, i, j) = t;
        first(l, j, i) = t;
      }
  TField<N - 1, 3> gam;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        Taylor<N - 1> s;
        for (int l = 0; l < 4; ++l) s.fma(gi(k, l), first(l, i, j));
        gam(k, i, j) = s;
        gam(k, j, i) = s;
      }
  return gam;
}

// (nabla T)_{e a1..aR} = d_e T_{a1..aR} - sum_slots Gamma^k_{e a_s} T_{..k..}
template <int N, int R, int M>
TField<N - 1, R + 1> covariant_derivative(const TField<N, R>& t, const TField<M, 3>& gamma_in) {
  static_assert(M >= N - 1, "Christoffel jet too short");
  const TField<N - 1, 3> gamma = truncate_field<N - 1>(gamma_in);
  const TField<N - 1, R> tt = truncate_field<N - 1>(t);
  TField<N - 1, R + 1> r;
  for (int e = 0; e < 4; ++e) {
    TField<N - 1, R> d = partial_field(t, e);
    for (int k = 0; k < TField<N, R>::size; ++k) {
      Taylor<N - 1> s = d.c[k];
      auto idx = TField<N, R>::unflat(k);
      Taylor<N - 1> corr;
      for (int slot = 0; slot < R; ++slot) {
        auto j = idx;
        for (int q = 0; q < 4; ++q) {
          j[slot] = q;
          int kk = 0;
          for (int i = 0; i < R; ++i) kk = 4 * kk + j[i];
          corr.fma(gamma(q, e, idx[slot]), tt.c[kk]);
        }
      }
      r.c[e * TField<N, R>::size + k] = s - corr;
    }
  }
  return r;
}

// Same formula with pointwise partials supplied explicitly (used when the
// partial derivatives come from finite differences).
template <int R>
DTensor<R + 1> covariant_from_partials(const std::array<DTensor<R>, 4>& partials, const DTensor<R>& t,
                                       const DTensor<3>& gamma) {
  DTensor<R + 1> r;
  for (int e = 0; e < 4; ++e)
    for (int k = 0; k < DTensor<R>::size; ++k) {
      auto idx = DTensor<R>::unflat(k);
      double s = partials[e].c[k];
      for (int slot = 0; slot < R; ++slot) {
        auto j = idx;
        for (int q = 0; q < 4; ++q) {
          j[slot] = q;
          int kk = 0;
          for (int i = 0; i < R; ++i) kk = 4 * kk + j[i];
          s -= gamma(q, e, idx[slot]) * t.c[kk];
        }
      }
      r.c[e * DTensor<R>::size + k] = s;
    }
  return r;
}

// Fully covariant Riemann tensor from a metric jet of order N.
template <int N>
TField<N - 2, 4> riemann(const TField<N, 2>& g, const TField<N - 1, 3>& gamma) {
  static_assert(N >= 2, "Riemann needs second derivatives");
  using T = Taylor<N - 2>;
  const TField<N - 2, 3> gm = truncate_field<N - 2>(gamma);
  std::array<TField<N - 2, 3>, 4> dgam;
  for (int v = 0; v < 4; ++v) dgam[v] = partial_field(gamma, v);
  // mixed R^r_{s mu nu}
  TField<N - 2, 4> mixed;
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s)
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = mu + 1; nu < 4; ++nu) {
          T t = dgam[mu](r, nu, s) - dgam[nu](r, mu, s);
          for (int l = 0; l < 4; ++l) {
            t.fma(gm(r, mu, l), gm(l, nu, s));
            t -= gm(r, nu, l) * gm(l, mu, s);
          }
          mixed(r, s, mu, nu) = t;
          mixed(r, s, nu, mu) = -t;
        }
  const TField<N - 2, 2> gt = truncate_field<N - 2>(g);
  TField<N - 2, 4> low;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = c + 1; d < 4; ++d) {
          T t;
          for (int q = 0; q < 4; ++q) t.fma(gt(a, q), mixed(q, b, c, d));
          low(a, b, c, d) = t;
          low(a, b, d, c) = -t;
        }
  return low;
}

template <class S>
Tensor<S, 2> ricci(const Tensor<S, 4>& riem, const Tensor<S, 2>& ginv) {
  Tensor<S, 2> ric;
  for (int a = 0; a < 4; ++a)
    for (int c = a; c < 4; ++c) {
      S s(0.0);
      for (int b = 0; b < 4; ++b)
        for (int d = 0; d < 4; ++d) mac(s, ginv(b, d), riem(a, b, c, d));
      ric(a, c) = s;
      ric(c, a) = s;
    }
  return ric;
}

template <class S>
S trace(const Tensor<S, 2>& t, const Tensor<S, 2>& ginv) {
  S s(0.0);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) mac(s, ginv(a, b), t(a, b));
  return s;
}

template <class S>
Tensor<S, 4> weyl(const Tensor<S, 4>& riem, const Tensor<S, 2>& g, const Tensor<S, 2>& ric, const S& scal) {
  Tensor<S, 4> w;
  const S r6 = scal * (1.0 / 6.0);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          S t = riem(a, b, c, d);
          S ricpart = g(a, c) * ric(b, d) - g(a, d) * ric(b, c) - g(b, c) * ric(a, d) + g(b, d) * ric(a, c);
          t -= ricpart * 0.5;
          t += r6 * (g(a, c) * g(b, d) - g(a, d) * g(b, c));
          w(a, b, c, d) = t;
        }
  return w;
}

template <class S>
Tensor<S, 2> trace_free(const Tensor<S, 2>& ric, const Tensor<S, 2>& g, const S& scal) {
  Tensor<S, 2> e;
  for (int k = 0; k < 16; ++k) e.c[k] = ric.c[k] - scal * g.c[k] * 0.25;
  return e;
}

// eps_ab^{ef} = eps_{abmn} g^{me} g^{nf}
template <class S>
Tensor<S, 4> raise_last_pair(const Tensor<S, 4>& t, const Tensor<S, 2>& ginv) {
  Tensor<S, 4> half;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int m = 0; m < 4; ++m)
        for (int f = 0; f < 4; ++f) {
          S s(0.0);
          for (int n = 0; n < 4; ++n) mac(s, t(a, b, m, n), ginv(n, f));
          half(a, b, m, f) = s;
        }
  Tensor<S, 4> r;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int e = 0; e < 4; ++e)
        for (int f = 0; f < 4; ++f) {
          S s(0.0);
          for (int m = 0; m < 4; ++m) mac(s, ginv(e, m), half(a, b, m, f));
          r(a, b, e, f) = s;
        }
  return r;
}

// Hodge dual on the leading antisymmetric pair of a rank-R tensor:
// (*T)_{ab...} = 1/2 eps_ab^{cd} T_{cd...}
template <class S, int R>
Tensor<S, R> hodge_first_pair(const Tensor<S, R>& t, const Tensor<S, 4>& eps_up) {
  static_assert(R >= 2);
  constexpr int tail = pow4(R - 2);
  Tensor<S, R> r;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      for (int k = 0; k < tail; ++k) {
        S s(0.0);
        for (int c = 0; c < 4; ++c)
          for (int d = c + 1; d < 4; ++d) mac(s, eps_up(a, b, c, d), t.c[(c * 4 + d) * tail + k]);
        r.c[(a * 4 + b) * tail + k] = s;
      }
    }
  return r;
}

// Self-dual part on the leading pair: 1/2 (T + *T)
template <class S, int R>
Tensor<S, R> self_dual_part(const Tensor<S, R>& t, const Tensor<S, 4>& eps_up) {
  Tensor<S, R> r = hodge_first_pair(t, eps_up);
  for (int k = 0; k < Tensor<S, R>::size; ++k) r.c[k] = (r.c[k] + t.c[k]) * 0.5;
  return r;
}

// Matrix of X_ab -> W_ab^cd X_cd on the coefficient vectors (x_cd, c<d):
// M[(ab),(cd)] = 2 W_ab^cd. Its eigenvalues on self-dual forms are 2 lambda_i.
template <class S>
std::array<std::array<S, 6>, 6> pair_operator(const Tensor<S, 4>& w, const Tensor<S, 2>& ginv) {
  static constexpr int pa[6] = {0, 0, 0, 1, 1, 2};
  static constexpr int pb[6] = {1, 2, 3, 2, 3, 3};
  const Tensor<S, 4> wup = raise_last_pair(w, ginv);
  std::array<std::array<S, 6>, 6> m;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) m[i][j] = wup(pa[i], pb[i], pa[j], pb[j]) * 2.0;
  return m;
}

// Power sums p2 = sum lambda_i^2 and p3 = sum lambda_i^3 of the self-dual Weyl
// eigenvalues, from traces of the pair operator.
template <class S>
std::array<S, 2> lambda_power_sums(const Tensor<S, 4>& wplus, const Tensor<S, 2>& ginv) {
  const auto m = pair_operator(wplus, ginv);
  std::array<std::array<S, 6>, 6> m2;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      S s(0.0);
      for (int k = 0; k < 6; ++k) mac(s, m[i][k], m[k][j]);
      m2[i][j] = s;
    }
  S t2(0.0), t3(0.0);
  for (int i = 0; i < 6; ++i) {
    t2 += m2[i][i];
    for (int k = 0; k < 6; ++k) mac(t3, m2[i][k], m[k][i]);
  }
  return {t2 * 0.25, t3 * 0.125};
}

// Jet of the simple root lambda3 of  l^3 - (p2/2) l - p3/3 = 0  starting from
// its base value. Newton in jet arithmetic doubles the correct orders per step.
template <int N>
Taylor<N> lambda3_jet(const std::array<Taylor<N>, 2>& psums, double lambda0) {
  const Taylor<N>& p2 = psums[0];
  const Taylor<N>& p3 = psums[1];
  Taylor<N> l(lambda0);
  for (int correct = 1; correct <= 2 * N + 1; correct *= 2) {
    const Taylor<N> l2 = l * l;
    const Taylor<N> f = l2 * l - p2 * l * 0.5 - p3 * (1.0 / 3.0);
    const Taylor<N> df = l2 * 3.0 - p2 * 0.5;
    l -= f / df;
  }
  return l;
}

// Roots of l^3 - (p2/2) l - p3/3 (the eigenvalues of a trace-free symmetric
// 3x3 problem), ascending.
inline std::array<double, 3> trace_free_cubic_roots(double p2, double p3) {
  // l = 2 sqrt(p2/6) cos(theta), cos(3 theta) = (p3/3) / (2 (p2/6)^{3/2})
  const double q = p2 / 6.0;
  if (q <= 0.0) return {0.0, 0.0, 0.0};
  const double sq = std::sqrt(q);
  double arg = (p3 / 3.0) / (2.0 * q * sq);
  arg = std::max(-1.0, std::min(1.0, arg));
  const double th = std::acos(arg) / 3.0;
  const double pi = 3.14159265358979323846;
  std::array<double, 3> r = {2.0 * sq * std::cos(th + 2.0 * pi / 3.0), 2.0 * sq * std::cos(th + 4.0 * pi / 3.0),
                             2.0 * sq * std::cos(th)};
  std::sort(r.begin(), r.end());
  return r;
}

}  // namespace sdw

#endif  // SDW_FIELDS_HPP
