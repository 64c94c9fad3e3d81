#pragma once

// Dense trivariate polynomials of total degree <= 3 with exact symbolic
// differentiation. Used as an independent reference for the discrete
// differential operators.

#include <array>
#include <cmath>
#include <random>

#include "gradplast/errors.hpp"
#include "gradplast/tensor.hpp"

namespace gradplast::oracle {

inline constexpr int kMaxDegree = 3;

class Poly {
 public:
  static constexpr int kSize = kMaxDegree + 1;

  Poly() { c_.fill(0.0); }
  static Poly constant(double v) {
    Poly p;
    p.c_[0] = v;
    return p;
  }
  /// The coordinate x_d.
  static Poly coord(int d) {
    Poly p;
    std::array<int, 3> e{0, 0, 0};
    e[d] = 1;
    p.set(e[0], e[1], e[2], 1.0);
    return p;
  }
  static Poly monomial(int a, int b, int c, double coef = 1.0) {
    Poly p;
    p.set(a, b, c, coef);
    return p;
  }
  /// Random coefficients up to the given total degree, uniform in [-1, 1].
  template <typename Rng>
  static Poly random(Rng& rng, int degree) {
    if (degree > kMaxDegree) throw DegreeOverflow("degree " + std::to_string(degree) + " exceeds cap");
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Poly p;
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b)
        for (int c = 0; a + b + c <= degree; ++c) p.set(a, b, c, U(rng));
    return p;
  }

  double coef(int a, int b, int c) const {
    if (a < 0 || b < 0 || c < 0 || a + b + c > kMaxDegree) return 0.0;
    return c_[idx(a, b, c)];
  }
  void set(int a, int b, int c, double v) {
    if (a < 0 || b < 0 || c < 0) throw IndexOutOfRange("negative exponent");
    if (a + b + c > kMaxDegree) throw DegreeOverflow("monomial degree exceeds cap");
    c_[idx(a, b, c)] = v;
  }

  int degree() const {
    int d = -1;
    for (int a = 0; a < kSize; ++a)
      for (int b = 0; b < kSize; ++b)
        for (int c = 0; c < kSize; ++c)
          if (c_[idx(a, b, c)] != 0.0) d = std::max(d, a + b + c);
    return d;
  }

  double operator()(const Vec3& x) const {
    double s = 0.0;
    for (int a = 0; a < kSize; ++a)
      for (int b = 0; a + b < kSize; ++b)
        for (int c = 0; a + b + c < kSize; ++c) {
          const double v = c_[idx(a, b, c)];
          if (v != 0.0) s += v * std::pow(x[0], a) * std::pow(x[1], b) * std::pow(x[2], c);
        }
    return s;
  }

  Poly derivative(int d) const {
    Poly r;
    for (int a = 0; a < kSize; ++a)
      for (int b = 0; a + b < kSize; ++b)
        for (int c = 0; a + b + c < kSize; ++c) {
          const std::array<int, 3> e{a, b, c};
          if (e[d] == 0) continue;
          std::array<int, 3> f = e;
          --f[d];
          r.c_[idx(f[0], f[1], f[2])] += e[d] * c_[idx(a, b, c)];
        }
    return r;
  }

  Poly& operator+=(const Poly& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Poly& operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) { return a *= -1.0; }
  friend Poly operator*(double s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& p, const Poly& q) {
    if (p.degree() + q.degree() > kMaxDegree) throw DegreeOverflow("product exceeds degree cap");
    Poly r;
    for (int a = 0; a < kSize; ++a)
      for (int b = 0; a + b < kSize; ++b)
        for (int c = 0; a + b + c < kSize; ++c) {
          const double u = p.c_[idx(a, b, c)];
          if (u == 0.0) continue;
          for (int d = 0; a + d < kSize; ++d)
            for (int e = 0; a + b + c + d + e < kSize; ++e)
              for (int f = 0; a + b + c + d + e + f < kSize; ++f)
                r.c_[idx(a + d, b + e, c + f)] += u * q.c_[idx(d, e, f)];
        }
    return r;
  }
  friend bool operator==(const Poly&, const Poly&) = default;

 private:
  static constexpr int idx(int a, int b, int c) { return (a * kSize + b) * kSize + c; }
  std::array<double, kSize * kSize * kSize> c_;
};

using PolyVector = std::array<Poly, 3>;

/// Tensor field with polynomial components, row-major (i, j).
struct PolyTensorField {
  std::array<Poly, 9> c;

  Poly& operator()(int i, int j) { return c[3 * i + j]; }
  const Poly& operator()(int i, int j) const { return c[3 * i + j]; }

  Mat3 at(const Vec3& x) const {
    Mat3 m;
    for (int k = 0; k < 9; ++k) m.a[k] = c[k](x);
    return m;
  }
  PolyVector row(int i) const { return {c[3 * i], c[3 * i + 1], c[3 * i + 2]}; }
  int degree() const {
    int d = -1;
    for (const auto& p : c) d = std::max(d, p.degree());
    return d;
  }

  friend PolyTensorField operator+(PolyTensorField a, const PolyTensorField& b) {
    for (int k = 0; k < 9; ++k) a.c[k] += b.c[k];
    return a;
  }
  friend PolyTensorField operator*(double s, PolyTensorField a) {
    for (auto& p : a.c) p *= s;
    return a;
  }
  friend bool operator==(const PolyTensorField&, const PolyTensorField&) = default;
};

/// Third-order polynomial array t(i, j, k).
struct PolyThird {
  std::array<Poly, 27> c;
  Poly& operator()(int i, int j, int k) { return c[9 * i + 3 * j + k]; }
  const Poly& operator()(int i, int j, int k) const { return c[9 * i + 3 * j + k]; }
};

inline PolyTensorField symbolic_grad(const PolyVector& v) {
  PolyTensorField g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = v[i].derivative(j);
  return g;
}

/// Gradient of each row: G(i, j, k) = d_k P_ij.
inline PolyThird symbolic_grad(const PolyTensorField& P) {
  PolyThird g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) g(i, j, k) = P(i, j).derivative(k);
  return g;
}

inline Grad3 eval_grad(const PolyThird& g, const Vec3& x) {
  Grad3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[i](j, k) = g(i, j, k)(x);
  return out;
}

inline PolyVector symbolic_curl(const PolyVector& v) {
  return {v[2].derivative(1) - v[1].derivative(2), v[0].derivative(2) - v[2].derivative(0),
          v[1].derivative(0) - v[0].derivative(1)};
}

/// Row-wise curl: row i of the result is curl of row i of P.
inline PolyTensorField symbolic_curl(const PolyTensorField& P) {
  if (P.degree() > kMaxDegree) throw DegreeOverflow("field degree exceeds cap");
  PolyTensorField r;
  for (int i = 0; i < 3; ++i) {
    const PolyVector c = symbolic_curl(P.row(i));
    for (int j = 0; j < 3; ++j) r(i, j) = c[j];
  }
  return r;
}

inline PolyTensorField symbolic_curl_curl(const PolyTensorField& P) { return symbolic_curl(symbolic_curl(P)); }

/// Row-wise divergence of a tensor field.
inline PolyVector symbolic_div(const PolyTensorField& P) {
  PolyVector r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i] += P(i, j).derivative(j);
  return r;
}

/// Divergence on the last index of a third-order field.
inline PolyTensorField symbolic_div(const PolyThird& m) {
  PolyTensorField r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r(i, j) += m(i, j, k).derivative(k);
  return r;
}

template <typename Rng>
PolyTensorField random_tensor_field(Rng& rng, int degree) {
  PolyTensorField P;
  for (auto& p : P.c) p = Poly::random(rng, degree);
  return P;
}

/// Random symmetric trace-free field.
template <typename Rng>
PolyTensorField random_dev_sym_field(Rng& rng, int degree) {
  PolyTensorField P;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      P(i, j) = Poly::random(rng, degree);
      P(j, i) = P(i, j);
    }
  const Poly tr = (1.0 / 3.0) * (P(0, 0) + P(1, 1) + P(2, 2));
  for (int i = 0; i < 3; ++i) P(i, i) -= tr;
  return P;
}

}  // namespace gradplast::oracle
