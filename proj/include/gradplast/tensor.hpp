#pragma once

// 3x3 tensor algebra for small-strain gradient plasticity.
//
// Conventions: <A,B> = tr(A B^T) (Frobenius), |A| = sqrt(<A,A>).
// A third-order gradient is stored as Grad3 with g[i](j,k) = d X_ij / d x_k,
// i.e. g[i] is the gradient of the i-th row of X.

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "gradplast/errors.hpp"

namespace gradplast {

using Vec3 = std::array<double, 3>;

struct Mat3 {
  std::array<double, 9> a{};

  constexpr double& operator()(int i, int j) { return a[3 * i + j]; }
  constexpr double operator()(int i, int j) const { return a[3 * i + j]; }

  static constexpr Mat3 zero() { return Mat3{}; }
  static constexpr Mat3 identity() {
    Mat3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
  }
  static constexpr Mat3 unit(int i, int j) {
    Mat3 m;
    m(i, j) = 1.0;
    return m;
  }

  Mat3& operator+=(const Mat3& o) {
    for (int k = 0; k < 9; ++k) a[k] += o.a[k];
    return *this;
  }
  Mat3& operator-=(const Mat3& o) {
    for (int k = 0; k < 9; ++k) a[k] -= o.a[k];
    return *this;
  }
  Mat3& operator*=(double s) {
    for (auto& x : a) x *= s;
    return *this;
  }
  friend bool operator==(const Mat3&, const Mat3&) = default;
};

inline Mat3 operator+(Mat3 x, const Mat3& y) { return x += y; }
inline Mat3 operator-(Mat3 x, const Mat3& y) { return x -= y; }
inline Mat3 operator-(Mat3 x) { return x *= -1.0; }
inline Mat3 operator*(double s, Mat3 x) { return x *= s; }
inline Mat3 operator*(Mat3 x, double s) { return x *= s; }

inline Vec3 operator+(const Vec3& x, const Vec3& y) { return {x[0] + y[0], x[1] + y[1], x[2] + y[2]}; }
inline Vec3 operator-(const Vec3& x, const Vec3& y) { return {x[0] - y[0], x[1] - y[1], x[2] - y[2]}; }
inline Vec3 operator*(double s, const Vec3& x) { return {s * x[0], s * x[1], s * x[2]}; }

inline double dot(const Vec3& x, const Vec3& y) { return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]; }
inline double norm(const Vec3& x) { return std::sqrt(dot(x, x)); }
inline Vec3 cross(const Vec3& x, const Vec3& y) {
  return {x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
}

/// Frobenius product <A,B> = tr(A B^T).
inline double frob(const Mat3& x, const Mat3& y) {
  double s = 0.0;
  for (int k = 0; k < 9; ++k) s += x.a[k] * y.a[k];
  return s;
}
inline double norm(const Mat3& x) { return std::sqrt(frob(x, x)); }

inline double trace(const Mat3& x) { return x(0, 0) + x(1, 1) + x(2, 2); }

inline Mat3 transpose(const Mat3& x) {
  Mat3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = x(j, i);
  return t;
}

inline Mat3 sym(const Mat3& x) {
  Mat3 s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s(i, j) = 0.5 * (x(i, j) + x(j, i));
  return s;
}

inline Mat3 skew(const Mat3& x) {
  Mat3 s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s(i, j) = 0.5 * (x(i, j) - x(j, i));
  return s;
}

inline Mat3 dev(const Mat3& x) {
  Mat3 d = x;
  const double m = trace(x) / 3.0;
  d(0, 0) -= m;
  d(1, 1) -= m;
  d(2, 2) -= m;
  return d;
}

inline Mat3 matmul(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += x(i, k) * y(k, j);
      r(i, j) = s;
    }
  return r;
}

inline Vec3 matvec(const Mat3& x, const Vec3& v) {
  return {x(0, 0) * v[0] + x(0, 1) * v[1] + x(0, 2) * v[2],
          x(1, 0) * v[0] + x(1, 1) * v[1] + x(1, 2) * v[2],
          x(2, 0) * v[0] + x(2, 1) * v[1] + x(2, 2) * v[2]};
}

inline Mat3 outer(const Vec3& x, const Vec3& y) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = x[i] * y[j];
  return r;
}

inline Vec3 row(const Mat3& x, int i) { return {x(i, 0), x(i, 1), x(i, 2)}; }

struct Decomposition {
  Mat3 sym;
  Mat3 skew;
  Mat3 dev;
  double tr = 0.0;
};

inline Decomposition decompose(const Mat3& x) {
  return {gradplast::sym(x), gradplast::skew(x), gradplast::dev(x), frob(x, Mat3::identity())};
}

/// Skew matrix A with A v = a x v. Inverse of axl.
inline Mat3 anti(const Vec3& a) {
  Mat3 m;
  m(0, 1) = -a[2];
  m(0, 2) = a[1];
  m(1, 0) = a[2];
  m(1, 2) = -a[0];
  m(2, 0) = -a[1];
  m(2, 1) = a[0];
  return m;
}

/// Axial vector of a skew matrix; rejects inputs with |sym A| > 1e-12 |A|.
inline Vec3 axl(const Mat3& x) {
  const double nx = norm(x);
  if (norm(sym(x)) > 1e-12 * nx)
    throw NonSkewInput("axl: input is not skew-symmetric");
  return {x(2, 1), x(0, 2), x(1, 0)};
}

/// axl(skew X) without the skew check; this is the form used inside L.
inline Vec3 axl_of_skew_part(const Mat3& x) {
  return {0.5 * (x(2, 1) - x(1, 2)), 0.5 * (x(0, 2) - x(2, 0)), 0.5 * (x(1, 0) - x(0, 1))};
}

using Grad3 = std::array<Mat3, 3>;

/// Row i of the result is 2 axl(skew g[i]), which equals curl of row i of X
/// when g is the gradient of X.
inline Mat3 L_apply(const Grad3& g) {
  Mat3 r;
  for (int i = 0; i < 3; ++i) {
    const Vec3 w = axl_of_skew_part(g[i]);
    for (int k = 0; k < 3; ++k) r(i, k) = 2.0 * w[k];
  }
  return r;
}

/// 2 sum_i <skew g_i, h_i>; equals <L g, L h>.
inline double curl_pairing_via_skew(const Grad3& g, const Grad3& h) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += frob(skew(g[i]), h[i]);
  return 2.0 * s;
}

struct MaterialParams {
  double mu = 1.0;
  double lambda = 1.0;
  double kappa = 1.0 + 2.0 / 3.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double Lc = 0.0;
  double sigma_y = std::numeric_limits<double>::infinity();

  /// Builds a parameter set with kappa derived from the Lame moduli.
  static MaterialParams from_lame(double mu, double lambda, double k1, double k2, double Lc,
                                  double sigma_y) {
    MaterialParams p;
    p.mu = mu;
    p.lambda = lambda;
    p.kappa = lambda + 2.0 * mu / 3.0;
    p.k1 = k1;
    p.k2 = k2;
    p.Lc = Lc;
    p.sigma_y = sigma_y;
    p.validate();
    return p;
  }

  void validate() const {
    if (!(mu > 0.0)) throw ValidationError("mu must be > 0");
    if (!(3.0 * lambda + 2.0 * mu > 0.0)) throw ValidationError("3*lambda + 2*mu must be > 0");
    const double kref = lambda + 2.0 * mu / 3.0;
    if (std::abs(kappa - kref) > 1e-12 * std::max(1.0, std::abs(kref)))
      throw ValidationError("kappa must equal lambda + 2*mu/3");
    if (k1 < 0.0) throw ValidationError("k1 must be >= 0");
    if (k2 < 0.0) throw ValidationError("k2 must be >= 0");
    if (Lc < 0.0) throw ValidationError("Lc must be >= 0");
    if (!(sigma_y > 0.0)) throw ValidationError("sigma_y must be > 0");
  }

  friend bool operator==(const MaterialParams&, const MaterialParams&) = default;
};

/// Isotropic elasticity: 2 mu sym X + lambda tr(X) 1.
inline Mat3 elasticity_apply(const MaterialParams& prm, const Mat3& x) {
  Mat3 r = 2.0 * prm.mu * sym(x);
  const double t = prm.lambda * trace(x);
  r(0, 0) += t;
  r(1, 1) += t;
  r(2, 2) += t;
  return r;
}

/// <C sym X, sym Y>, written so that swapping X and Y gives bitwise the same value.
inline double elastic_pairing(const MaterialParams& prm, const Mat3& x, const Mat3& y) {
  return 2.0 * prm.mu * frob(sym(x), sym(y)) + prm.lambda * trace(x) * trace(y);
}

}  // namespace gradplast
