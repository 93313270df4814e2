#ifndef SDW_FORMS_HPP
#define SDW_FORMS_HPP

// Exterior calculus on form-valued Taylor fields. A field of rank R whose
// leading P slots are antisymmetric is treated as a P-form with values in the
// remaining (passive) slots; d and d* act on the leading slots while the
// covariant derivative acts on every slot.

#include <cstdint>
#include <random>

#include "sdw/fields.hpp"
#include "sdw/tensor.hpp"

namespace sdw {

// (d* T)_{a2..aR} = -g^{bc} nabla_b T_{c a2..aR}
template <int N, int R, int M, int K>
TField<N - 1, R - 1> codifferential(const TField<N, R>& t, const TField<M, 3>& gamma, const TField<K, 2>& ginv) {
  static_assert(R >= 1 && K >= N - 1);
  const TField<N - 1, R + 1> nt = covariant_derivative(t, gamma);
  const TField<N - 1, 2> gi = truncate_field<N - 1>(ginv);
  constexpr int tail = pow4(R - 1);
  TField<N - 1, R - 1> r;
  for (int k = 0; k < tail; ++k) {
    Taylor<N - 1> s;
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) s.fma(gi(b, c), nt.c[(b * 4 + c) * tail + k]);
    r.c[k] = -s;
  }
  return r;
}

// (dT) = (P+1) nabla_[a0 T_a1..aP] rest, for P = 1 or 2 leading form slots.
template <int P, int N, int R, int M>
TField<N - 1, R + 1> exterior_derivative(const TField<N, R>& t, const TField<M, 3>& gamma) {
  static_assert(P == 1 || P == 2);
  const TField<N - 1, R + 1> nt = covariant_derivative(t, gamma);
  constexpr int tail = pow4(R - P);
  TField<N - 1, R + 1> r;
  if constexpr (P == 1) {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int k = 0; k < tail; ++k)
          r.c[(a * 4 + b) * tail + k] = nt.c[(a * 4 + b) * tail + k] - nt.c[(b * 4 + a) * tail + k];
  } else {
    auto at = [&](int x, int y, int z, int k) -> const Taylor<N - 1>& { return nt.c[((x * 4 + y) * 4 + z) * tail + k]; };
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int k = 0; k < tail; ++k)
            r.c[((a * 4 + b) * 4 + c) * tail + k] = at(a, b, c, k) + at(b, c, a, k) + at(c, a, b, k);
  }
  return r;
}

// Rough Laplacian g^{ab} nabla_a nabla_b T.
template <int N, int R, int M, int K>
TField<N - 2, R> rough_laplacian(const TField<N, R>& t, const TField<M, 3>& gamma, const TField<K, 2>& ginv) {
  const TField<N - 1, R + 1> nt = covariant_derivative(t, gamma);
  const TField<N - 2, R + 2> nnt = covariant_derivative(nt, gamma);
  const TField<N - 2, 2> gi = truncate_field<N - 2>(ginv);
  constexpr int tail = pow4(R);
  TField<N - 2, R> r;
  for (int k = 0; k < tail; ++k) {
    Taylor<N - 2> s;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) s.fma(gi(a, b), nnt.c[(a * 4 + b) * tail + k]);
    r.c[k] = s;
  }
  return r;
}

// d d* T for a 2-form-valued field.
template <int N, int R, int M, int K>
TField<N - 2, R> d_codifferential(const TField<N, R>& t, const TField<M, 3>& gamma, const TField<K, 2>& ginv) {
  return exterior_derivative<1>(codifferential(t, gamma, ginv), gamma);
}

// d* d T for a 2-form-valued field.
template <int N, int R, int M, int K>
TField<N - 2, R> codifferential_d(const TField<N, R>& t, const TField<M, 3>& gamma, const TField<K, 2>& ginv) {
  return codifferential(exterior_derivative<2>(t, gamma), gamma, ginv);
}

// Laplace-de Rham operator dd* + d*d on a 2-form-valued field.
template <int N, int R, int M, int K>
TField<N - 2, R> laplace_de_rham(const TField<N, R>& t, const TField<M, 3>& gamma, const TField<K, 2>& ginv) {
  return d_codifferential(t, gamma, ginv) + codifferential_d(t, gamma, ginv);
}

// Closed-form random 2-form: F_ab = alpha + sum_v beta_v sin(omega_v x_v + phi_v)
// + sum_{v<=w} gamma_vw (x_v - c_v)(x_w - c_w) per component a < b.
struct AnalyticTwoForm {
  struct Component {
    double alpha = 0.0;
    std::array<double, 4> beta{}, omega{}, phi{};
    std::array<std::array<double, 4>, 4> quad{};
  };
  std::array<Component, 6> comp;
  std::array<double, 4> center{};

  static AnalyticTwoForm random(std::uint64_t seed, const std::array<double, 4>& center, double amplitude = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    AnalyticTwoForm f;
    f.center = center;
    for (auto& c : f.comp) {
      c.alpha = amplitude * u(rng);
      for (int v = 0; v < 4; ++v) {
        c.beta[v] = amplitude * u(rng);
        c.omega[v] = 1.0 + 0.5 * u(rng);
        c.phi[v] = 3.0 * u(rng);
        for (int w = v; w < 4; ++w) c.quad[v][w] = 0.5 * amplitude * u(rng);
      }
    }
    return f;
  }

  static AnalyticTwoForm constant(const std::array<double, 6>& values) {
    AnalyticTwoForm f;
    for (int i = 0; i < 6; ++i) f.comp[i].alpha = values[i];
    return f;
  }

  template <int N>
  TField<N, 2> evaluate(const std::array<Taylor<N>, 4>& x) const {
    static constexpr int pa[6] = {0, 0, 0, 1, 1, 2};
    static constexpr int pb[6] = {1, 2, 3, 2, 3, 3};
    TField<N, 2> f;
    for (int i = 0; i < 6; ++i) {
      const Component& c = comp[i];
      Taylor<N> s(c.alpha);
      for (int v = 0; v < 4; ++v) {
        if (c.beta[v] != 0.0) s += sin(x[v] * c.omega[v] + c.phi[v]) * c.beta[v];
        for (int w = v; w < 4; ++w)
          if (c.quad[v][w] != 0.0) s += (x[v] - center[v]) * (x[w] - center[w]) * c.quad[v][w];
      }
      f(pa[i], pb[i]) = s;
      f(pb[i], pa[i]) = -s;
    }
    return f;
  }
};

// Z_abcd = F_ab G_cd + H_ab K_cd, antisymmetric in each pair.
struct AnalyticPairField {
  AnalyticTwoForm f, g, h, k;

  static AnalyticPairField random(std::uint64_t seed, const std::array<double, 4>& center) {
    return {AnalyticTwoForm::random(seed * 4 + 1, center), AnalyticTwoForm::random(seed * 4 + 2, center),
            AnalyticTwoForm::random(seed * 4 + 3, center), AnalyticTwoForm::random(seed * 4 + 4, center)};
  }

  template <int N>
  TField<N, 4> evaluate(const std::array<Taylor<N>, 4>& x) const {
    const auto F = f.evaluate<N>(x), G = g.evaluate<N>(x), H = h.evaluate<N>(x), K = k.evaluate<N>(x);
    TField<N, 4> z;
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j) {
        Taylor<N> s = F.c[i] * G.c[j];
        s.fma(H.c[i], K.c[j]);
        z.c[i * 16 + j] = s;
      }
    return z;
  }
};

}  // namespace sdw

#endif  // SDW_FORMS_HPP
