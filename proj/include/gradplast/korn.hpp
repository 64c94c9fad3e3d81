#pragma once

// Discrete constant of the Korn-type inequality for incompatible fields
//   ||p||^2 <= C^2 (||sym p||^2 + ||Curl p||^2)
// on nodal trilinear tensor fields with p x n = 0 on the chosen faces.

#include <cmath>
#include <random>

#include "gradplast/assembly.hpp"
#include "gradplast/linalg.hpp"
#include "gradplast/plastic_space.hpp"

namespace gradplast {

struct KornProblem {
  Grid grid;
  FaceSet gamma_faces = FaceSet::all();
  double length_scale = 1.0;  ///< multiplies Curl so both terms carry the same units

  void validate() const {
    grid.validate();
    if (!(length_scale > 0.0)) throw ValidationError("length_scale must be > 0");
  }
};

struct KornResult {
  double lambda_min = 0.0;
  double constant = 0.0;  ///< 1/sqrt(lambda_min), +inf when lambda_min <= 0
  int iterations = 0;
  int cg_iterations = 0;
};

/// Rayleigh quotient (||sym P||^2 + l^2 ||Curl P||^2) / ||P||^2 of the masked
/// field, by Gauss quadrature of the interpolant.
inline double korn_quotient(const KornProblem& prob, const TensorField& P) {
  prob.validate();
  const Grid& g = prob.grid;
  if (P.size() != static_cast<std::size_t>(g.node_count()))
    throw ValidationError("field size does not match grid");
  const TensorField Q = apply_micro_hard_mask(g, prob.gamma_faces, P);
  const CellShape shape = reference_shape(g);
  const double l2 = prob.length_scale * prob.length_scale;
  double num = 0.0, den = 0.0;
  for (int c = 0; c < g.cell_count(); ++c) {
    const auto nodes = g.cell_nodes(c);
    for (int q = 0; q < kGaussPerCell; ++q) {
      const double w = shape.weight[q];
      const Mat3 v = interpolate_at(shape, q, Q, nodes);
      const Mat3 s = sym(v);
      const Mat3 cp = L_apply(tensor_gradient_at(g, Q, nodes, shape.xi[q]));
      num += w * (frob(s, s) + l2 * frob(cp, cp));
      den += w * frob(v, v);
    }
  }
  if (!(den > 0.0)) throw ZeroField("korn_quotient: field vanishes after masking");
  return num / den;
}

/// Constrained stiffness (K_sym + l^2 K_curl) and consistent mass on the
/// unrestricted tensor space with p x n = 0 on gamma_faces.
struct KornOperators {
  PlasticSpace space;
  SpMat K;
  SpMat M;
};

inline KornOperators korn_operators(const KornProblem& prob) {
  prob.validate();
  const auto F = assemble_full(prob.grid, MaterialParams{});
  KornOperators op;
  op.space = PlasticSpace(prob.grid, PlasticKind::Full, prob.gamma_faces);
  const SpMat P = plastic_embedding(op.space);
  SpMat Kf = F.Ksym + prob.length_scale * prob.length_scale * F.Kcurl;
  op.K = restrict_sym(Kf, P);
  op.M = restrict_sym(F.M, P);
  return op;
}

/// Smallest generalized eigenvalue of K x = lambda M x by inverse iteration
/// with Jacobi-CG inner solves. A shift of 1e-8 max diag(K)/diag(M) keeps
/// the iteration defined when K is singular (no boundary condition).
inline KornResult estimate_min_quotient(const KornProblem& prob, double tol, int max_iter = 500) {
  if (!(tol > 0.0)) throw ValidationError("tol must be > 0");
  const KornOperators op = korn_operators(prob);
  KornResult res;
  const Eigen::Index n = op.K.rows();
  if (n == 0) throw ZeroField("estimate_min_quotient: constrained space is empty");

  const Vec dK = op.K.diagonal(), dM = op.M.diagonal();
  double ratio = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) ratio = std::max(ratio, dK[i] / dM[i]);
  const double shift = 1e-8 * ratio;
  const SpMat A = op.K + shift * op.M;
  Vec diag = A.diagonal();

  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Vec x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = U(rng);
  x /= std::sqrt(x.dot(op.M * x));

  double lambda = x.dot(op.K * x);
  Vec y = x;
  for (int it = 1; it <= max_iter; ++it) {
    res.iterations = it;
    const Vec b = op.M * x;
    const CgResult cg = pcg([&](const Vec& v) -> Vec { return A * v; }, diag, b, y, 1e-12, 50 * static_cast<int>(n));
    res.cg_iterations += cg.iterations;
    if (!cg.converged) throw NoConvergence("estimate_min_quotient: inner CG failed");
    const double nrm = std::sqrt(y.dot(op.M * y));
    if (!(nrm > 0.0)) throw NoConvergence("estimate_min_quotient: iterate collapsed");
    x = y / nrm;
    y = x;
    const double next = x.dot(op.K * x);
    const double change = std::abs(next - lambda);
    lambda = next;
    if (change <= tol * std::max(std::abs(lambda), shift)) {
      res.lambda_min = std::max(lambda, 0.0);
      res.constant = res.lambda_min > 0.0 ? 1.0 / std::sqrt(res.lambda_min) : INFINITY;
      return res;
    }
  }
  throw NoConvergence("estimate_min_quotient: no convergence after " + std::to_string(max_iter) + " iterations");
}

}  // namespace gradplast
