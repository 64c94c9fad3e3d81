#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "gradplast/errors.hpp"

namespace gradplast {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients for an SPD operator. Stops when
/// |b - A x| <= tol |b|; x holds the initial guess on entry.
template <typename Apply>
CgResult pcg(Apply&& apply, const Vec& diag, const Vec& b, Vec& x, double tol, int max_iter) {
  CgResult res;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    res.converged = true;
    return res;
  }
  Vec r = b - apply(x);
  double rnorm = r.norm();
  if (rnorm <= tol * bnorm) {
    res.relative_residual = rnorm / bnorm;
    res.converged = true;
    return res;
  }
  const Vec inv_diag = diag.cwiseInverse();
  Vec z = inv_diag.cwiseProduct(r);
  Vec p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= max_iter; ++it) {
    const Vec Ap = apply(p);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0)) {
      res.iterations = it;
      res.relative_residual = rnorm / bnorm;
      return res;
    }
    const double alpha = rz / pAp;
    x.noalias() += alpha * p;
    r.noalias() -= alpha * Ap;
    rnorm = r.norm();
    res.iterations = it;
    if (rnorm <= tol * bnorm) {
      res.relative_residual = rnorm / bnorm;
      res.converged = true;
      return res;
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  res.relative_residual = rnorm / bnorm;
  return res;
}

inline CgResult pcg(const SpMat& A, const Vec& b, Vec& x, double tol, int max_iter) {
  Vec d = A.diagonal();
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (!(d[i] > 0.0)) d[i] = 1.0;
  return pcg([&](const Vec& v) -> Vec { return A * v; }, d, b, x, tol, max_iter);
}

/// Largest eigenvalue of W^{-1} A (A symmetric PSD, W positive diagonal) by
/// power iteration on W^{-1/2} A W^{-1/2}, fixed seed.
inline double power_iteration_max(const SpMat& A, const Vec& w, int iterations,
                                  std::uint64_t seed = 12345) {
  const Eigen::Index n = A.rows();
  if (n == 0) return 0.0;
  const Vec s = w.cwiseSqrt().cwiseInverse();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Vec x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = U(rng);
  x.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const Vec y = s.cwiseProduct(A * s.cwiseProduct(x));
    lambda = x.dot(y);
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;
    x = y / ny;
  }
  const Vec y = s.cwiseProduct(A * s.cwiseProduct(x));
  return std::max(lambda, x.dot(y));
}

/// 0.5 (A + A^T); floating addition is commutative, so the result is exactly symmetric.
inline SpMat symmetrized(const SpMat& A) {
  SpMat At = A.transpose();
  SpMat S = 0.5 * (A + At);
  S.makeCompressed();
  return S;
}

}  // namespace gradplast
