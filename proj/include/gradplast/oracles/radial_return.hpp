#pragma once

// Classical small-strain J2 plasticity at a material point, integrated by
// the radial return map. Reference for the homogeneous gradient model.

#include <cmath>
#include <vector>

#include "gradplast/tensor.hpp"

namespace gradplast::oracle {

enum class Hardening { Kinematic, Isotropic };

struct PointState {
  Mat3 sigma;
  Mat3 eps_p;
  double gamma = 0.0;
};

inline Mat3 linear_stress(const MaterialParams& prm, const Mat3& eps_e) {
  return prm.lambda * trace(eps_e) * Mat3::identity() + 2.0 * prm.mu * eps_e;
}

/// One state per entry of `strain_path`; the path starts from the virgin state.
inline std::vector<PointState> radial_return_0d(const MaterialParams& prm, const std::vector<Mat3>& strain_path,
                                                Hardening hardening) {
  std::vector<PointState> out;
  out.reserve(strain_path.size());
  Mat3 ep = Mat3::zero();
  double gamma = 0.0;
  const double mu = prm.mu;
  for (const Mat3& eps : strain_path) {
    const Mat3 s = 2.0 * mu * dev(eps - ep);
    Mat3 eta = s;
    double radius = prm.sigma_y;
    double modulus = 2.0 * mu;
    if (hardening == Hardening::Kinematic) {
      eta -= mu * prm.k1 * ep;
      modulus += mu * prm.k1;
    } else {
      radius += mu * prm.k2 * gamma;
      modulus += mu * prm.k2;
    }
    const double en = norm(eta);
    if (en > radius) {
      const double dl = (en - radius) / modulus;
      ep += (dl / en) * eta;
      gamma += dl;
    }
    out.push_back({linear_stress(prm, eps - ep), ep, gamma});
  }
  return out;
}

}  // namespace gradplast::oracle
