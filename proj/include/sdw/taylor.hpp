#ifndef SDW_TAYLOR_HPP
#define SDW_TAYLOR_HPP

// Truncated multivariate Taylor arithmetic in the four chart coordinates.
//
// A Taylor<N> holds the coefficients c_alpha = (d^alpha f)(p) / alpha! of a
// function around a base point p, for all multi-indices |alpha| <= N.
// Arithmetic is exact polynomial arithmetic modulo terms of degree > N, so
// nesting closed-form operations yields exact partial derivatives up to
// order N (to rounding).

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace sdw {

inline constexpr int kDim = 4;
inline constexpr int kMaxTaylorOrder = 6;

constexpr int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

// Number of monomials of degree <= n in four variables.
constexpr int monomial_count(int n) { return binomial(n + kDim, kDim); }

using MultiIndex = std::array<int, kDim>;

namespace detail {

struct MonomialTable {
  std::vector<MultiIndex> exps;    // graded order, degree <= kMaxTaylorOrder
  std::vector<int> degree;
  std::array<int, 7 * 7 * 7 * 7> lookup{};

  MonomialTable() {
    lookup.fill(-1);
    for (int d = 0; d <= kMaxTaylorOrder; ++d) {
      // lexicographically descending within a degree
      for (int a = d; a >= 0; --a)
        for (int b = d - a; b >= 0; --b)
          for (int c = d - a - b; c >= 0; --c) {
            MultiIndex e{a, b, c, d - a - b - c};
            lookup[key(e)] = static_cast<int>(exps.size());
            exps.push_back(e);
            degree.push_back(d);
          }
    }
  }
  static int key(const MultiIndex& e) { return ((e[0] * 7 + e[1]) * 7 + e[2]) * 7 + e[3]; }
  int index(const MultiIndex& e) const { return lookup[key(e)]; }
};

inline const MonomialTable& monomials() {
  static const MonomialTable table;
  return table;
}

struct ProductEntry {
  int i, j, k;
};

template <int N>
const std::vector<ProductEntry>& product_table() {
  static const std::vector<ProductEntry> table = [] {
    const auto& m = monomials();
    std::vector<ProductEntry> t;
    const int n = monomial_count(N);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (m.degree[i] + m.degree[j] > N) continue;
        MultiIndex e;
        for (int v = 0; v < kDim; ++v) e[v] = m.exps[i][v] + m.exps[j][v];
        t.push_back({i, j, m.index(e)});
      }
    return t;
  }();
  return table;
}

// derivative table: for each target monomial beta (|beta| <= N-1) the source
// index of beta + e_v and the factor beta_v + 1.
template <int N>
const std::array<std::vector<std::pair<int, double>>, kDim>& derivative_table() {
  static const auto table = [] {
    std::array<std::vector<std::pair<int, double>>, kDim> t;
    const auto& m = monomials();
    const int n = monomial_count(N - 1);
    for (int v = 0; v < kDim; ++v) {
      t[v].resize(n);
      for (int k = 0; k < n; ++k) {
        MultiIndex e = m.exps[k];
        e[v] += 1;
        t[v][k] = {m.index(e), static_cast<double>(e[v])};
      }
    }
    return t;
  }();
  return table;
}

}  // namespace detail

template <int N>
class Taylor {
  static_assert(N >= 0 && N <= kMaxTaylorOrder, "Taylor order out of range");

 public:
  static constexpr int order = N;
  static constexpr int size = monomial_count(N);

  Taylor() { c_.fill(0.0); }
  Taylor(double v) {  // NOLINT: implicit promotion of constants is intended
    c_.fill(0.0);
    c_[0] = v;
  }

  // The coordinate function x_v around a base value x0.
  static Taylor variable(int v, double x0) {
    Taylor t(x0);
    if constexpr (N >= 1) t.c_[1 + v] = 1.0;
    return t;
  }

  double value() const { return c_[0]; }
  double& operator[](int k) { return c_[k]; }
  double operator[](int k) const { return c_[k]; }
  const std::array<double, size>& coefficients() const { return c_; }

  double coefficient(const MultiIndex& e) const {
    const int k = detail::monomials().index(e);
    return (k >= 0 && k < size) ? c_[k] : 0.0;
  }

  // Partial derivative d^alpha f at the base point.
  double partial(const MultiIndex& e) const {
    double f = coefficient(e);
    for (int v = 0; v < kDim; ++v)
      for (int q = 2; q <= e[v]; ++q) f *= q;
    return f;
  }

  Taylor& operator+=(const Taylor& o) {
    for (int k = 0; k < size; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Taylor& operator-=(const Taylor& o) {
    for (int k = 0; k < size; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Taylor& operator*=(double s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  Taylor& operator/=(double s) { return *this *= (1.0 / s); }
  Taylor& operator+=(double s) {
    c_[0] += s;
    return *this;
  }
  Taylor& operator-=(double s) {
    c_[0] -= s;
    return *this;
  }
  Taylor& operator*=(const Taylor& o) {
    *this = *this * o;
    return *this;
  }
  Taylor& operator/=(const Taylor& o) {
    *this = *this / o;
    return *this;
  }

  // r += a * b, the hot loop of every tensor contraction.
  void fma(const Taylor& a, const Taylor& b) {
    if constexpr (N == 0) {
      c_[0] += a.c_[0] * b.c_[0];
    } else {
      for (const auto& e : detail::product_table<N>()) c_[e.k] += a.c_[e.i] * b.c_[e.j];
    }
  }

  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    Taylor r;
    r.fma(a, b);
    return r;
  }
  friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
  friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
  friend Taylor operator-(Taylor a) {
    for (auto& x : a.c_) x = -x;
    return a;
  }
  friend Taylor operator+(Taylor a, double s) { return a += s; }
  friend Taylor operator+(double s, Taylor a) { return a += s; }
  friend Taylor operator-(Taylor a, double s) { return a -= s; }
  friend Taylor operator-(double s, const Taylor& a) { return (-a) += s; }
  friend Taylor operator*(Taylor a, double s) { return a *= s; }
  friend Taylor operator*(double s, Taylor a) { return a *= s; }
  friend Taylor operator/(Taylor a, double s) { return a /= s; }

  // Apply a univariate function given its scaled derivatives at the base
  // value, coeffs[k] = f^(k)(x0) / k!, by Horner evaluation in h = x - x0.
  Taylor compose(const std::array<double, N + 1>& coeffs) const {
    Taylor h = *this;
    h.c_[0] = 0.0;
    Taylor r(coeffs[N]);
    for (int k = N - 1; k >= 0; --k) {
      r = r * h;
      r.c_[0] += coeffs[k];
    }
    return r;
  }

  friend Taylor operator/(const Taylor& a, const Taylor& b) { return a * reciprocal(b); }
  friend Taylor operator/(double s, const Taylor& b) { return reciprocal(b) * s; }

  friend Taylor reciprocal(const Taylor& b) {
    const double x0 = b.value();
    std::array<double, N + 1> f;
    double p = 1.0 / x0;
    for (int k = 0; k <= N; ++k) {
      f[k] = (k % 2 == 0 ? p : -p);
      p /= x0;
    }
    return b.compose(f);
  }

  // x^a for real a (base value must be positive unless a is an integer).
  friend Taylor pow(const Taylor& x, double a) {
    const double x0 = x.value();
    std::array<double, N + 1> f;
    double binom = 1.0;
    for (int k = 0; k <= N; ++k) {
      f[k] = binom * std::pow(x0, a - k);
      binom *= (a - k) / (k + 1);
    }
    return x.compose(f);
  }
  friend Taylor sqrt(const Taylor& x) { return pow(x, 0.5); }
  friend Taylor cbrt(const Taylor& x) { return pow(x, 1.0 / 3.0); }

  friend Taylor exp(const Taylor& x) {
    std::array<double, N + 1> f;
    double e = std::exp(x.value());
    double fact = 1.0;
    for (int k = 0; k <= N; ++k) {
      if (k > 0) fact *= k;
      f[k] = e / fact;
    }
    return x.compose(f);
  }

  friend Taylor log(const Taylor& x) {
    const double x0 = x.value();
    std::array<double, N + 1> f;
    f[0] = std::log(x0);
    double p = 1.0;
    for (int k = 1; k <= N; ++k) {
      p /= x0;
      f[k] = ((k % 2 == 1) ? 1.0 : -1.0) * p / k;
    }
    return x.compose(f);
  }

  friend Taylor sin(const Taylor& x) {
    const double s = std::sin(x.value()), c = std::cos(x.value());
    const double cyc[4] = {s, c, -s, -c};
    std::array<double, N + 1> f;
    double fact = 1.0;
    for (int k = 0; k <= N; ++k) {
      if (k > 0) fact *= k;
      f[k] = cyc[k % 4] / fact;
    }
    return x.compose(f);
  }

  friend Taylor cos(const Taylor& x) {
    const double s = std::sin(x.value()), c = std::cos(x.value());
    const double cyc[4] = {c, -s, -c, s};
    std::array<double, N + 1> f;
    double fact = 1.0;
    for (int k = 0; k <= N; ++k) {
      if (k > 0) fact *= k;
      f[k] = cyc[k % 4] / fact;
    }
    return x.compose(f);
  }

 private:
  std::array<double, size> c_;
};

// d/dx_v, dropping one order.
template <int N>
Taylor<N - 1> derivative(const Taylor<N>& f, int v) {
  static_assert(N >= 1, "cannot differentiate an order-0 jet");
  Taylor<N - 1> r;
  const auto& table = detail::derivative_table<N>()[v];
  for (int k = 0; k < Taylor<N - 1>::size; ++k) r[k] = table[k].second * f[table[k].first];
  return r;
}

template <int M, int N>
Taylor<M> truncate(const Taylor<N>& f) {
  static_assert(M <= N, "truncate can only lower the order");
  Taylor<M> r;
  for (int k = 0; k < Taylor<M>::size; ++k) r[k] = f[k];
  return r;
}

// Substitute displacement polynomials h_v (zero constant term) into f:
// returns f(h_0, ..., h_3) where f is read as a polynomial in displacements.
template <int N>
Taylor<N> compose(const Taylor<N>& f, const std::array<Taylor<N>, kDim>& h) {
  const auto& m = detail::monomials();
  std::array<std::array<Taylor<N>, N + 1>, kDim> pw;
  for (int v = 0; v < kDim; ++v) {
    pw[v][0] = Taylor<N>(1.0);
    for (int k = 1; k <= N; ++k) pw[v][k] = pw[v][k - 1] * h[v];
  }
  Taylor<N> r;
  for (int k = 0; k < Taylor<N>::size; ++k) {
    if (f[k] == 0.0) continue;
    const auto& e = m.exps[k];
    Taylor<N> term = pw[0][e[0]];
    for (int v = 1; v < kDim; ++v)
      if (e[v] > 0) term = term * pw[v][e[v]];
    term *= f[k];
    r += term;
  }
  return r;
}

template <class T>
struct is_taylor : std::false_type {};
template <int N>
struct is_taylor<Taylor<N>> : std::true_type {};

// Value at the base point of either a double or a Taylor jet.
inline double value_of(double x) { return x; }
template <int N>
double value_of(const Taylor<N>& x) {
  return x.value();
}

}  // namespace sdw

#endif  // SDW_TAYLOR_HPP
