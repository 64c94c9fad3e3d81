#pragma once

// A model variant discretized on a grid with its boundary configuration:
// constrained operators, Dirichlet lifting, body-force loads, and the
// smooth part of the incremental energy with its gradient.

#include <cmath>
#include <utility>

#include "gradplast/assembly.hpp"
#include "gradplast/linalg.hpp"
#include "gradplast/models.hpp"

namespace gradplast {

/// Load at one level of the program: Dirichlet amplitude (scales the
/// boundary displacement pattern) and a uniform body force.
struct Load {
  double amplitude = 0.0;
  Vec3 body_force{0.0, 0.0, 0.0};
  friend bool operator==(const Load&, const Load&) = default;
};

class Discretization {
 public:
  Discretization(const Grid& grid, const BoundaryConfig& bc, const ModelVariant& variant)
      : grid_(grid), bc_(bc), variant_(variant) {
    grid.validate();
    bc.validate();
    variant.params.validate();
    if (variant.kinematic() && !(variant.params.k1 > 0.0))
      throw SingularBlock(std::string(to_string(variant.tag)) + ": k1 = 0 leaves the bilinear form singular");
    full_ = assemble_full(grid, variant.params, variant.defect_form);
    blocks_ = constrain(grid, full_, bc.gamma_faces, variant.kind(), bc.hard_faces());

    App_full_ = full_.Kel;
    if (variant.curl_coefficient() != 0.0) App_full_ += variant.curl_coefficient() * full_.Kcurl;
    if (variant.sym_coefficient() != 0.0) App_full_ += variant.sym_coefficient() * full_.Ksym;
    App_ = blocks_.Kel;
    if (variant.curl_coefficient() != 0.0) App_ += variant.curl_coefficient() * blocks_.Kcurl;
    if (variant.sym_coefficient() != 0.0) App_ += variant.sym_coefficient() * blocks_.Ksym;
    App_ = symmetrized(App_);
    KupT_ = SpMat(blocks_.Kup.transpose());

    // Dirichlet field per unit amplitude on Γ nodes.
    const int n = grid.node_count();
    uD_unit_ = Vec::Zero(3 * n);
    for (int v = 0; v < n; ++v) {
      if ((grid.node_faces(v) & bc.gamma_faces).empty()) continue;
      const Vec3 x = grid.node_coords(v) - grid.origin;
      const Vec3 val = matvec(bc.displacement_gradient, x);
      for (int d = 0; d < 3; ++d) uD_unit_[3 * v + d] = val[d];
    }
    const Vec KuuD = full_.Kuu * uD_unit_;
    lift_u_ = SpMat(blocks_.Su.transpose()) * KuuD;
    lift_p_ = SpMat(blocks_.Pp.transpose()) * (full_.Kpu * uD_unit_);
    uD_energy_ = 0.5 * uD_unit_.dot(KuuD);
    Kuu_diag_ = blocks_.Kuu.diagonal();
    for (Eigen::Index i = 0; i < Kuu_diag_.size(); ++i)
      if (!(Kuu_diag_[i] > 0.0)) Kuu_diag_[i] = 1.0;
  }

  const Grid& grid() const { return grid_; }
  const BoundaryConfig& boundary() const { return bc_; }
  const ModelVariant& variant() const { return variant_; }
  const FullOperators& full() const { return full_; }
  const Blocks& blocks() const { return blocks_; }
  const PlasticSpace& pspace() const { return blocks_.pspace; }
  const DisplacementSpace& uspace() const { return blocks_.uspace; }
  const SpMat& App() const { return App_; }
  const SpMat& KupT() const { return KupT_; }
  const SpMat& App_full() const { return App_full_; }
  const Vec& Kuu_diag() const { return Kuu_diag_; }
  const Vec& lift_u() const { return lift_u_; }
  const Vec& lift_p() const { return lift_p_; }
  int nu() const { return blocks_.uspace.size(); }
  int np() const { return blocks_.pspace.size(); }

  /// Body-force load on the free displacement dofs.
  Vec body_load(const Vec3& f) const {
    Vec b(nu());
    for (int k = 0; k < nu(); ++k) {
      const int dof = blocks_.uspace.free_dofs[k];
      b[k] = full_.lumped[dof / 3] * f[dof % 3];
    }
    return b;
  }

  Vec u_free(const VectorField& u) const {
    Vec x(nu());
    for (int k = 0; k < nu(); ++k) {
      const int dof = blocks_.uspace.free_dofs[k];
      x[k] = u[dof / 3][dof % 3];
    }
    return x;
  }

  Vec u_full(const Vec& uf, double amplitude) const {
    Vec x = amplitude * uD_unit_;
    for (int k = 0; k < nu(); ++k) x[blocks_.uspace.free_dofs[k]] = uf[k];
    return x;
  }

  VectorField u_field(const Vec& uf, double amplitude) const { return unflatten_vec(u_full(uf, amplitude)); }

  /// Smooth part of the incremental energy (elastic + defect + kinematic
  /// hardening + load), including the constant terms from the Dirichlet data.
  double smooth_energy(const Vec& uf, const Vec& pc, const Load& load) const {
    const Vec Ku = blocks_.Kuu * uf;
    const Vec Kp = blocks_.Kup * pc;
    const Vec Ap = App_ * pc;
    const double a = amp_sq(load) * uD_energy_;
    const Vec fu = body_load(load.body_force);
    double e = 0.5 * uf.dot(Ku) + uf.dot(Kp) + 0.5 * pc.dot(Ap);
    e += load.amplitude * (uf.dot(lift_u_) + pc.dot(lift_p_)) + a;
    e -= uf.dot(fu);
    e -= prescribed_load_work(load);
    return e;
  }

  Vec grad_u(const Vec& uf, const Vec& pc, const Load& load) const {
    return blocks_.Kuu * uf + blocks_.Kup * pc + load.amplitude * lift_u_ - body_load(load.body_force);
  }

  Vec grad_p(const Vec& uf, const Vec& pc, const Load& load) const {
    return KupT_ * uf + App_ * pc + load.amplitude * lift_p_;
  }

  /// Nodal Eshelby stress by lumped weak recovery:
  /// Σ_E = -W^{-1} (∂/∂p of the smooth energy) over all nine components.
  TensorField eshelby_full(const Vec& uf, const Vec& pc, const Load& load) const {
    const Vec u = u_full(uf, load.amplitude);
    const Vec g = full_.Kpu * u + App_full_ * (blocks_.Pp * pc);
    TensorField S(grid_.node_count());
    for (int v = 0; v < grid_.node_count(); ++v)
      for (int k = 0; k < 9; ++k) S[v].a[k] = -g[9 * v + k] / full_.lumped[v];
    return S;
  }

 private:
  static double amp_sq(const Load& l) { return l.amplitude * l.amplitude; }

  double prescribed_load_work(const Load& load) const {
    double s = 0.0;
    if (load.amplitude == 0.0) return 0.0;
    for (int v = 0; v < grid_.node_count(); ++v)
      for (int d = 0; d < 3; ++d)
        if (blocks_.uspace.full_to_free[3 * v + d] < 0)
          s += full_.lumped[v] * load.body_force[d] * load.amplitude * uD_unit_[3 * v + d];
    return s;
  }

  Grid grid_;
  BoundaryConfig bc_;
  ModelVariant variant_;
  FullOperators full_;
  Blocks blocks_;
  SpMat App_full_;
  SpMat App_;
  SpMat KupT_;
  Vec uD_unit_;
  Vec lift_u_;
  Vec lift_p_;
  double uD_energy_ = 0.0;
  Vec Kuu_diag_;
};

/// Nodal Eshelby stress Σ_E = σ - mu Lc^2 Curl Curl p - mu k1 dev sym p,
/// with every term recovered weakly against the lumped mass.
inline TensorField eshelby_stress(const Discretization& disc, const SimState& s, const Load& load) {
  return disc.eshelby_full(disc.u_free(s.u), disc.pspace().to_coords(s.p), load);
}

}  // namespace gradplast
