#ifndef SDW_TENSOR_HPP
#define SDW_TENSOR_HPP

// Fixed-dimension (4) tensors with all indices in covariant position.
// Components are stored row-major: T(a0, ..., a_{R-1}).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "sdw/taylor.hpp"

namespace sdw {

constexpr int pow4(int r) { return r == 0 ? 1 : 4 * pow4(r - 1); }

template <class S, int R>
struct Tensor {
  static constexpr int rank = R;
  static constexpr int size = pow4(R);
  std::array<S, size> c{};

  Tensor() {
    for (auto& x : c) x = S(0.0);
  }

  template <class... I>
  S& operator()(I... idx) {
    static_assert(sizeof...(I) == R);
    return c[flat(idx...)];
  }
  template <class... I>
  const S& operator()(I... idx) const {
    static_assert(sizeof...(I) == R);
    return c[flat(idx...)];
  }

  template <class... I>
  static constexpr int flat(I... idx) {
    int k = 0;
    ((k = 4 * k + static_cast<int>(idx)), ...);
    return k;
  }
  static constexpr std::array<int, R> unflat(int k) {
    std::array<int, R> idx{};
    for (int i = R - 1; i >= 0; --i) {
      idx[i] = k % 4;
      k /= 4;
    }
    return idx;
  }

  Tensor& operator+=(const Tensor& o) {
    for (int k = 0; k < size; ++k) c[k] += o.c[k];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    for (int k = 0; k < size; ++k) c[k] -= o.c[k];
    return *this;
  }
  Tensor& operator*=(double s) {
    for (auto& x : c) x *= s;
    return *this;
  }
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(Tensor a, double s) { return a *= s; }
  friend Tensor operator*(double s, Tensor a) { return a *= s; }
};

template <int R>
using DTensor = Tensor<double, R>;
template <int N, int R>
using TField = Tensor<Taylor<N>, R>;

using Mat4 = DTensor<2>;
using Vec4 = DTensor<1>;

// Base-point values of a Taylor tensor field.
template <int N, int R>
DTensor<R> values(const TField<N, R>& f) {
  DTensor<R> r;
  for (int k = 0; k < DTensor<R>::size; ++k) r.c[k] = f.c[k].value();
  return r;
}

template <int M, int N, int R>
TField<M, R> truncate_field(const TField<N, R>& f) {
  TField<M, R> r;
  for (int k = 0; k < TField<N, R>::size; ++k) r.c[k] = truncate<M>(f.c[k]);
  return r;
}

// Coordinate partial d_v of every component.
template <int N, int R>
TField<N - 1, R> partial_field(const TField<N, R>& f, int v) {
  TField<N - 1, R> r;
  for (int k = 0; k < TField<N, R>::size; ++k) r.c[k] = derivative(f.c[k], v);
  return r;
}

template <int R>
double max_abs(const DTensor<R>& t) {
  double m = 0.0;
  for (double x : t.c) m = std::max(m, std::abs(x));
  return m;
}

template <int R>
double max_abs_diff(const DTensor<R>& a, const DTensor<R>& b) {
  double m = 0.0;
  for (int k = 0; k < DTensor<R>::size; ++k) m = std::max(m, std::abs(a.c[k] - b.c[k]));
  return m;
}

// <A, B>_g = g^{a1 b1} ... g^{aR bR} A_{a1..aR} B_{b1..bR}
template <int R>
double inner(const DTensor<R>& a, const DTensor<R>& b, const Mat4& ginv) {
  // raise indices of b one slot at a time
  DTensor<R> t = b;
  for (int slot = 0; slot < R; ++slot) {
    DTensor<R> u;
    for (int k = 0; k < DTensor<R>::size; ++k) {
      auto idx = DTensor<R>::unflat(k);
      double s = 0.0;
      for (int e = 0; e < 4; ++e) {
        auto j = idx;
        j[slot] = e;
        int kk = 0;
        for (int i = 0; i < R; ++i) kk = 4 * kk + j[i];
        s += ginv(idx[slot], e) * t.c[kk];
      }
      u.c[k] = s;
    }
    t = u;
  }
  double s = 0.0;
  for (int k = 0; k < DTensor<R>::size; ++k) s += a.c[k] * t.c[k];
  return s;
}

template <int R>
double norm(const DTensor<R>& a, const Mat4& ginv) {
  return std::sqrt(std::max(0.0, inner(a, a, ginv)));
}

// Raise every index with ginv (result still stored in a Tensor).
template <int R>
DTensor<R> raise_all(const DTensor<R>& t, const Mat4& ginv) {
  DTensor<R> cur = t;
  for (int slot = 0; slot < R; ++slot) {
    DTensor<R> u;
    for (int k = 0; k < DTensor<R>::size; ++k) {
      auto idx = DTensor<R>::unflat(k);
      double s = 0.0;
      for (int e = 0; e < 4; ++e) {
        auto j = idx;
        j[slot] = e;
        int kk = 0;
        for (int i = 0; i < R; ++i) kk = 4 * kk + j[i];
        s += ginv(idx[slot], e) * cur.c[kk];
      }
      u.c[k] = s;
    }
    cur = u;
  }
  return cur;
}

inline Mat4 identity4() {
  Mat4 m;
  for (int a = 0; a < 4; ++a) m(a, a) = 1.0;
  return m;
}

inline Mat4 matmul(const Mat4& a, const Mat4& b) {
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

inline double det4(const Mat4& m) {
  // Laplace expansion on 2x2 minors
  const double s0 = m(0, 0) * m(1, 1) - m(1, 0) * m(0, 1);
  const double s1 = m(0, 0) * m(1, 2) - m(1, 0) * m(0, 2);
  const double s2 = m(0, 0) * m(1, 3) - m(1, 0) * m(0, 3);
  const double s3 = m(0, 1) * m(1, 2) - m(1, 1) * m(0, 2);
  const double s4 = m(0, 1) * m(1, 3) - m(1, 1) * m(0, 3);
  const double s5 = m(0, 2) * m(1, 3) - m(1, 2) * m(0, 3);
  const double c5 = m(2, 2) * m(3, 3) - m(3, 2) * m(2, 3);
  const double c4 = m(2, 1) * m(3, 3) - m(3, 1) * m(2, 3);
  const double c3 = m(2, 1) * m(3, 2) - m(3, 1) * m(2, 2);
  const double c2 = m(2, 0) * m(3, 3) - m(3, 0) * m(2, 3);
  const double c1 = m(2, 0) * m(3, 2) - m(3, 0) * m(2, 2);
  const double c0 = m(2, 0) * m(3, 1) - m(3, 0) * m(2, 1);
  return s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
}

// Gauss-Jordan with partial pivoting; returns false if singular.
inline bool invert4(const Mat4& m, Mat4& out) {
  double a[4][8];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      a[i][j] = m(i, j);
      a[i][j + 4] = (i == j) ? 1.0 : 0.0;
    }
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) return false;
    if (piv != col)
      for (int j = 0; j < 8; ++j) std::swap(a[piv][j], a[col][j]);
    const double d = a[col][col];
    for (int j = 0; j < 8; ++j) a[col][j] /= d;
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (int j = 0; j < 8; ++j) a[r][j] -= f * a[col][j];
    }
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(i, j) = a[i][j + 4];
  return true;
}

// Permutation sign of (a,b,c,d) as a rearrangement of (0,1,2,3); 0 if repeated.
constexpr int levi_civita(int a, int b, int c, int d) {
  int p[4] = {a, b, c, d};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (p[i] == p[j]) return 0;
  int sign = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (p[i] > p[j]) sign = -sign;
  return sign;
}

}  // namespace sdw

#endif  // SDW_TENSOR_HPP
