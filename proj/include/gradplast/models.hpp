#pragma once

// The five model variants: kinematic or isotropic hardening, with or without
// plastic spin, and the elastic micromorphic limit without a flow law.

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "gradplast/assembly.hpp"
#include "gradplast/grid.hpp"
#include "gradplast/plastic_space.hpp"
#include "gradplast/tensor.hpp"

namespace gradplast {

enum class VariantTag { KinSpin, IsoSpin, IsoIrrot, KinIrrot, Micromorphic };

inline std::string_view to_string(VariantTag t) {
  switch (t) {
    case VariantTag::KinSpin: return "kin_spin";
    case VariantTag::IsoSpin: return "iso_spin";
    case VariantTag::IsoIrrot: return "iso_irrot";
    case VariantTag::KinIrrot: return "kin_irrot";
    case VariantTag::Micromorphic: return "micromorphic";
  }
  return "?";
}

inline VariantTag variant_from_string(std::string_view s) {
  for (auto t : {VariantTag::KinSpin, VariantTag::IsoSpin, VariantTag::IsoIrrot, VariantTag::KinIrrot,
                 VariantTag::Micromorphic})
    if (to_string(t) == s) return t;
  throw ValidationError("unknown variant '" + std::string(s) + "'");
}

struct ModelVariant {
  VariantTag tag = VariantTag::KinSpin;
  MaterialParams params;
  /// How the defect energy pairing is assembled. Both give the same bilinear
  /// form; Microstress is the formulation through m_i = 2 mu Lc^2 skew grad p_i.
  DefectForm defect_form = DefectForm::Curl;

  bool kinematic() const {
    return tag == VariantTag::KinSpin || tag == VariantTag::KinIrrot || tag == VariantTag::Micromorphic;
  }
  bool isotropic() const { return tag == VariantTag::IsoSpin || tag == VariantTag::IsoIrrot; }
  bool irrotational() const { return tag == VariantTag::IsoIrrot || tag == VariantTag::KinIrrot; }
  bool has_flow_law() const { return tag != VariantTag::Micromorphic; }

  PlasticKind kind() const { return irrotational() ? PlasticKind::Strain : PlasticKind::Distortion; }

  /// Coefficient of <Curl p, Curl q> in the bilinear form.
  double curl_coefficient() const { return params.mu * params.Lc * params.Lc; }
  /// Coefficient of <sym p, sym q> in the bilinear form.
  double sym_coefficient() const { return kinematic() ? params.mu * params.k1 : 0.0; }

  void validate() const {
    params.validate();
    const std::string name(to_string(tag));
    if (kinematic() && !(params.k1 > 0.0)) throw ValidationError(name + " requires k1 > 0");
    if (isotropic() && !(params.k2 > 0.0)) throw ValidationError(name + " requires k2 > 0");
  }

  friend bool operator==(const ModelVariant&, const ModelVariant&) = default;
};

struct SimState {
  VectorField u;
  TensorField p;
  ScalarField gamma;
  double t = 0.0;

  static SimState zero(const Grid& g) {
    SimState s;
    s.u.assign(g.node_count(), Vec3{0.0, 0.0, 0.0});
    s.p.assign(g.node_count(), Mat3::zero());
    s.gamma.assign(g.node_count(), 0.0);
    return s;
  }
};

/// sigma = C sym(grad u - p) at every Gauss point (cell-major order).
inline std::vector<Mat3> cauchy_stress(const Grid& grid, const ModelVariant& variant,
                                       const VectorField& u, const TensorField& p) {
  const CellShape shape = reference_shape(grid);
  std::vector<Mat3> out(static_cast<std::size_t>(grid.cell_count()) * kGaussPerCell);
  for (int c = 0; c < grid.cell_count(); ++c) {
    const auto nodes = grid.cell_nodes(c);
    for (int q = 0; q < kGaussPerCell; ++q) {
      const Mat3 gu = vector_gradient_at(grid, u, nodes, shape.xi[q]);
      const Mat3 pq = interpolate_at(shape, q, p, nodes);
      out[c * kGaussPerCell + q] = elasticity_apply(variant.params, gu - pq);
    }
  }
  return out;
}

struct EnergySplit {
  double elastic = 0.0;
  double defect = 0.0;
  double hardening = 0.0;
  double load = 0.0;  ///< -<f, u>
  double total() const { return elastic + defect + hardening + load; }
};

/// Energy of a state by direct quadrature of the interpolated fields.
/// Isotropic hardening energy uses nodal (lumped) quadrature of gamma.
inline EnergySplit total_energy(const Grid& grid, const ModelVariant& variant, const SimState& s,
                                const Vec3& body_force = {0.0, 0.0, 0.0}) {
  const auto& prm = variant.params;
  const CellShape shape = reference_shape(grid);
  EnergySplit e;
  for (int c = 0; c < grid.cell_count(); ++c) {
    const auto nodes = grid.cell_nodes(c);
    for (int q = 0; q < kGaussPerCell; ++q) {
      const double w = shape.weight[q];
      const Mat3 gu = vector_gradient_at(grid, s.u, nodes, shape.xi[q]);
      const Mat3 pq = interpolate_at(shape, q, s.p, nodes);
      const Mat3 ee = sym(gu - pq);
      e.elastic += w * 0.5 * frob(elasticity_apply(prm, ee), ee);
      if (prm.Lc > 0.0) {
        const Mat3 cp = L_apply(tensor_gradient_at(grid, s.p, nodes, shape.xi[q]));
        e.defect += w * 0.5 * prm.mu * prm.Lc * prm.Lc * frob(cp, cp);
      }
      if (variant.kinematic()) {
        const Mat3 ds = dev(sym(pq));
        e.hardening += w * 0.5 * prm.mu * prm.k1 * frob(ds, ds);
      }
    }
  }
  for (int v = 0; v < grid.node_count(); ++v) {
    const double w = grid.lumped_weight(v);
    if (variant.isotropic() && !s.gamma.empty())
      e.hardening += w * 0.5 * prm.mu * prm.k2 * s.gamma[v] * s.gamma[v];
    e.load -= w * dot(body_force, s.u[v]);
  }
  return e;
}

/// Yield function. Spin variants use |dev Σ|, irrotational ones |dev sym Σ|;
/// isotropic variants enlarge the radius by mu k2 gamma.
inline double yield_value(const ModelVariant& variant, const Mat3& sigma_e, double gamma) {
  const Mat3 d = variant.irrotational() ? dev(sym(sigma_e)) : dev(sigma_e);
  double phi = norm(d) - variant.params.sigma_y;
  if (variant.isotropic()) phi -= variant.params.mu * variant.params.k2 * gamma;
  return phi;
}

/// Dissipation of a plastic increment with gamma eliminated via dgamma = |dp|.
inline double incremental_dissipation(const ModelVariant& variant, double dq_norm, double gamma_prev) {
  if (!variant.has_flow_law() || dq_norm == 0.0) return 0.0;
  double d = variant.params.sigma_y * dq_norm;
  if (variant.isotropic()) {
    const double h = variant.params.mu * variant.params.k2;
    // 1/2 h (g + m)^2 - 1/2 h g^2, expanded to avoid cancellation
    d += h * (gamma_prev * dq_norm + 0.5 * dq_norm * dq_norm);
  }
  return d;
}

inline double incremental_dissipation(const ModelVariant& variant, const Mat3& dq, double gamma_prev) {
  return incremental_dissipation(variant, norm(dq), gamma_prev);
}

}  // namespace gradplast
