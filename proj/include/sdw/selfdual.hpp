#ifndef SDW_SELFDUAL_HPP
#define SDW_SELFDUAL_HPP

// Orthonormal frames, the Hodge star on 2-forms, the self-dual 2-form basis
// and the eigensystem of the self-dual Weyl operator.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "sdw/curvature.hpp"
#include "sdw/errors.hpp"
#include "sdw/fields.hpp"
#include "sdw/geometry.hpp"
#include "sdw/tensor.hpp"

namespace sdw {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

struct Tetrad {
  std::array<Vec4, 4> e;  // e[mu](a) = e_mu^a
};

// Gram-Schmidt on the coordinate frame in coordinate order; for orientation
// -1 the last leg is reversed so that eps(e0, e1, e2, e3) > 0.
inline Tetrad orthonormal_tetrad(const Mat4& g, int orientation = 1) {
  Tetrad t;
  for (int mu = 0; mu < 4; ++mu) {
    Vec4 v;
    v(mu) = 1.0;
    for (int nu = 0; nu < mu; ++nu) {
      double p = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) p += g(a, b) * v(a) * t.e[nu](b);
      for (int a = 0; a < 4; ++a) v(a) -= p * t.e[nu](a);
    }
    double n2 = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) n2 += g(a, b) * v(a) * v(b);
    if (!(n2 > 0.0)) fail(ErrorCode::DegenerateMetric, "metric is not positive definite");
    const double inv = 1.0 / std::sqrt(n2);
    for (int a = 0; a < 4; ++a) v(a) *= inv;
    t.e[mu] = v;
  }
  if (orientation < 0)
    for (int a = 0; a < 4; ++a) t.e[3](a) = -t.e[3](a);
  return t;
}

inline Tetrad orthonormal_tetrad(const MetricJet& jet, int orientation = 1) {
  return orthonormal_tetrad(jet.value(), orientation);
}

// Coframe theta^mu_a = g_ab e_mu^b.
inline std::array<Vec4, 4> coframe(const Tetrad& t, const Mat4& g) {
  std::array<Vec4, 4> th;
  for (int mu = 0; mu < 4; ++mu)
    for (int a = 0; a < 4; ++a) {
      double s = 0.0;
      for (int b = 0; b < 4; ++b) s += g(a, b) * t.e[mu](b);
      th[mu](a) = s;
    }
  return th;
}

inline Mat4 wedge(const Vec4& x, const Vec4& y) {
  Mat4 w;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) w(a, b) = x(a) * y(b) - x(b) * y(a);
  return w;
}

struct TwoForm {
  Mat4 f;
  std::optional<Vec3> sd_coords;
};

// eps_ab^{cd} for the given orientation.
inline DTensor<4> epsilon_mixed(const Mat4& g, int orientation) {
  return raise_last_pair(volume_form(g, orientation), inverse_field(g));
}

inline Mat4 hodge_star(const Mat4& f, const Mat4& g, int orientation) {
  return hodge_first_pair(f, epsilon_mixed(g, orientation));
}

inline TwoForm hodge_star(const TwoForm& f, const Mat4& g, int orientation) {
  TwoForm r{hodge_star(f.f, g, orientation), std::nullopt};
  if (f.sd_coords) r.sd_coords = f.sd_coords;  // the star fixes self-dual forms
  return r;
}

inline TwoForm hodge_star(const TwoForm& f, const MetricJet& jet, int orientation) {
  return hodge_star(f, jet.value(), orientation);
}

// (W F)_ab = W_ab^{cd} F_cd with the sum over all c, d.
inline Mat4 apply_pair_operator(const DTensor<4>& w, const Mat4& f, const Mat4& ginv) {
  const Mat4 fu = raise_all(f, ginv);
  Mat4 r;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double s = 0.0;
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) s += w(a, b, c, d) * fu(c, d);
      r(a, b) = s;
    }
  return r;
}

// Self-dual basis (theta^0 ^ theta^i + theta^j ^ theta^k) / sqrt(2) for cyclic
// (i, j, k); each element has squared norm 2.
inline std::array<Mat4, 3> self_dual_basis(const Tetrad& t, const Mat4& g) {
  const auto th = coframe(t, g);
  static constexpr int cyc[3][3] = {{1, 2, 3}, {2, 3, 1}, {3, 1, 2}};
  std::array<Mat4, 3> b;
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < 3; ++i)
    b[i] = (wedge(th[0], th[cyc[i][0]]) + wedge(th[cyc[i][1]], th[cyc[i][2]])) * s;
  return b;
}

// Chart-constant self-dual reference forms dx^0 ^ dx^i + o dx^j ^ dx^k.
inline std::array<Mat4, 3> reference_forms(int orientation) {
  static constexpr int cyc[3][3] = {{1, 2, 3}, {2, 3, 1}, {3, 1, 2}};
  std::array<Mat4, 3> r;
  for (int i = 0; i < 3; ++i) {
    Vec4 d0, di, dj, dk;
    d0(0) = 1.0;
    di(cyc[i][0]) = 1.0;
    dj(cyc[i][1]) = 1.0;
    dk(cyc[i][2]) = 1.0;
    r[i] = wedge(d0, di) + wedge(dj, dk) * static_cast<double>(orientation);
  }
  return r;
}

struct SymEigen3 {
  Vec3 values;                // ascending
  std::array<Vec3, 3> vectors;  // unit, vectors[i] belongs to values[i]
};

namespace detail {

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 normalized(Vec3 v) {
  const double n = std::sqrt(dot(v, v));
  for (double& x : v) x /= n;
  return v;
}
inline Vec3 mat_vec(const Mat3& m, const Vec3& v) {
  return {dot(m[0], v), dot(m[1], v), dot(m[2], v)};
}

}  // namespace detail

// Symmetric 3x3 eigenproblem: closed-form roots with one Newton polish, the
// most isolated eigenvector from a cross product of shifted rows, and the
// other two from a 2x2 rotation in its orthogonal complement.
inline SymEigen3 symmetric_eigen3(const Mat3& m_in) {
  using detail::cross;
  using detail::dot;
  Mat3 a = m_in;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) a[i][j] = a[j][i] = 0.5 * (m_in[i][j] + m_in[j][i]);
  const double shift = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  for (int i = 0; i < 3; ++i) a[i][i] -= shift;

  double p2 = 0.0, scale = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      p2 += a[i][j] * a[j][i];
      scale = std::max(scale, std::abs(a[i][j]));
    }
  SymEigen3 r;
  if (scale == 0.0) {
    r.values = {shift, shift, shift};
    r.vectors = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    return r;
  }
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  auto mu = trace_free_cubic_roots(p2, 3.0 * det);
  for (double& x : mu) {
    const double q = x * x * x - 0.5 * p2 * x - det;
    const double dq = 3.0 * x * x - 0.5 * p2;
    if (std::abs(dq) > 1e-3 * p2) x -= q / dq;
  }
  std::sort(mu.begin(), mu.end());

  const int s = (mu[2] - mu[1] >= mu[1] - mu[0]) ? 2 : 0;
  Mat3 sh = a;
  for (int i = 0; i < 3; ++i) sh[i][i] -= mu[s];
  Vec3 best{0, 0, 0};
  double best_n = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const Vec3 c = cross(sh[i], sh[j]);
      const double n = dot(c, c);
      if (n > best_n) {
        best_n = n;
        best = c;
      }
    }
  if (best_n == 0.0) best = {1, 0, 0};
  const Vec3 vs = detail::normalized(best);
  int axis = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(vs[k]) < std::abs(vs[axis])) axis = k;
  Vec3 ax{0, 0, 0};
  ax[axis] = 1.0;
  const Vec3 u1 = detail::normalized(cross(vs, ax));
  const Vec3 u2 = cross(vs, u1);
  const Vec3 au1 = detail::mat_vec(a, u1), au2 = detail::mat_vec(a, u2);
  const double p = dot(u1, au1), q = dot(u1, au2), t = dot(u2, au2);
  const double th = 0.5 * std::atan2(2.0 * q, p - t);
  const double c = std::cos(th), sn = std::sin(th);
  Vec3 w1, w2;
  for (int k = 0; k < 3; ++k) {
    w1[k] = c * u1[k] + sn * u2[k];
    w2[k] = -sn * u1[k] + c * u2[k];
  }
  double l1 = p * c * c + 2.0 * q * sn * c + t * sn * sn;
  double l2 = p * sn * sn - 2.0 * q * sn * c + t * c * c;
  if (l1 > l2) {
    std::swap(l1, l2);
    std::swap(w1, w2);
  }
  if (s == 2) {
    r.values = {l1, l2, mu[2]};
    r.vectors = {w1, w2, vs};
  } else {
    r.values = {mu[0], l1, l2};
    r.vectors = {vs, w1, w2};
  }
  for (double& x : r.values) x += shift;
  return r;
}

struct SDWeylSystem {
  std::array<double, 3> lambdas{};      // ascending; matrix eigenvalues are 2 lambda
  std::array<Mat4, 3> eigenforms;       // <F^i, F^j> = 2 delta^ij
  std::array<Vec3, 3> sd_coords{};      // coefficients of F^i in `basis`
  double gap = 0.0;                     // min(lambda2 - lambda1, lambda3 - lambda2)
  bool simple_top = false;
  Mat3 matrix{};                        // 1/2 <B^i, W+ B^j>, unsymmetrized
  std::array<Mat4, 3> basis;            // self-dual basis B^i of the tetrad
  DTensor<4> wplus;
  double wplus_norm = 0.0;
  Mat4 g, ginv;
  int orientation = 1;
};

// Sign of each eigenform: nonnegative inner product with the first reference
// form whose overlap exceeds 1e-8 relative.
inline double eigenform_sign(const Mat4& f, const Mat4& ginv, int orientation) {
  const auto refs = reference_forms(orientation);
  const double nf = norm(f, ginv);
  for (const Mat4& ref : refs) {
    const double p = inner(f, ref, ginv);
    if (std::abs(p) >= 1e-8 * nf * norm(ref, ginv)) return p < 0.0 ? -1.0 : 1.0;
  }
  return 1.0;
}

inline SDWeylSystem weyl_plus_system(const CurvaturePack& pack, const Tetrad& tetrad, int orientation) {
  SDWeylSystem s;
  s.g = pack.g;
  s.ginv = pack.ginv;
  s.orientation = orientation;
  s.wplus = self_dual_part(pack.weyl, epsilon_mixed(pack.g, orientation));
  s.wplus_norm = norm(s.wplus, pack.ginv);
  s.basis = self_dual_basis(tetrad, pack.g);
  std::array<Mat4, 3> wb;
  for (int j = 0; j < 3; ++j) wb[j] = apply_pair_operator(s.wplus, s.basis[j], pack.ginv);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s.matrix[i][j] = 0.5 * inner(s.basis[i], wb[j], pack.ginv);
  const SymEigen3 eig = symmetric_eigen3(s.matrix);
  for (int i = 0; i < 3; ++i) {
    s.lambdas[i] = 0.5 * eig.values[i];
    Mat4 f;
    for (int k = 0; k < 3; ++k) f += s.basis[k] * eig.vectors[i][k];
    const double sign = eigenform_sign(f, pack.ginv, orientation);
    s.eigenforms[i] = f * sign;
    for (int k = 0; k < 3; ++k) s.sd_coords[i][k] = sign * eig.vectors[i][k];
  }
  s.gap = std::min(s.lambdas[1] - s.lambdas[0], s.lambdas[2] - s.lambdas[1]);
  s.simple_top = 2.0 * (s.lambdas[2] - s.lambdas[1]) > kGapRel * std::max(1.0, s.wplus_norm);
  return s;
}

inline SDWeylSystem weyl_plus_system(const CurvaturePack& pack, int orientation) {
  return weyl_plus_system(pack, orthonormal_tetrad(pack.g, orientation), orientation);
}

inline SDWeylSystem weyl_plus_system(const MetricSpec& spec, const Point& p) {
  return weyl_plus_system(curvature_pack(spec, p, false), spec.orientation);
}

inline void require_simple_top(const SDWeylSystem& s) {
  if (!s.simple_top) fail(ErrorCode::DegenerateEigenvalue, "top self-dual Weyl eigenvalue is not simple");
}

}  // namespace sdw

#endif  // SDW_SELFDUAL_HPP
