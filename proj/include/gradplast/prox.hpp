#pragma once

#include <algorithm>
#include <cmath>

#include "gradplast/models.hpp"
#include "gradplast/tensor.hpp"

namespace gradplast {

/// Magnitude of prox_{tau D_inc}(z) given |z|; the direction is z/|z|.
/// Kinematic: soft threshold at tau sigma_y. Isotropic: the scalar KKT
/// solution of m + tau (sigma_y + mu k2 (gamma_prev + m)) = |z|.
inline double prox_magnitude(const ModelVariant& variant, double znorm, double tau, double gamma_prev) {
  if (!variant.has_flow_law()) return znorm;
  const auto& prm = variant.params;
  if (variant.isotropic()) {
    const double h = prm.mu * prm.k2;
    return std::max(0.0, (znorm - tau * prm.sigma_y - tau * h * gamma_prev) / (1.0 + tau * h));
  }
  return std::max(0.0, znorm - tau * prm.sigma_y);
}

/// prox of tau * incremental_dissipation(·, gamma_prev) at z. Returns 0 when
/// |z| <= tau sigma_y (tie included).
inline Mat3 prox_dissipation(const ModelVariant& variant, const Mat3& z, double tau, double gamma_prev) {
  const double zn = norm(z);
  if (zn == 0.0) return Mat3::zero();
  const double m = prox_magnitude(variant, zn, tau, gamma_prev);
  if (m == 0.0) return Mat3::zero();
  return (m / zn) * z;
}

}  // namespace gradplast
