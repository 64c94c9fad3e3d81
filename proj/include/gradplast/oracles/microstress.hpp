#pragma once

// Microstress of the defect energy, m_i = 2 mu Lc^2 skew grad eps_i, and the
// identity Div m = -mu Lc^2 Curl Curl eps.

#include <algorithm>
#include <random>

#include "gradplast/oracles/poly.hpp"

namespace gradplast::oracle {

struct MicroStress {
  PolyThird m;  ///< m(i, j, k)

  /// Built row-wise from a symmetric trace-free plastic strain.
  static MicroStress from_plastic_strain(const MaterialParams& prm, const PolyTensorField& eps) {
    const double c = prm.mu * prm.Lc * prm.Lc;
    const PolyThird g = symbolic_grad(eps);
    MicroStress s;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) s.m(i, j, k) = c * (g(i, j, k) - g(i, k, j));
    return s;
  }

  /// Variant with m(l, l, k) = 0, obtained by removing the trace over the
  /// first two indices. Its pairing with trace-free test fields is unchanged.
  MicroStress trace_free() const {
    MicroStress t = *this;
    for (int k = 0; k < 3; ++k) {
      const Poly tr = (1.0 / 3.0) * (m(0, 0, k) + m(1, 1, k) + m(2, 2, k));
      for (int i = 0; i < 3; ++i) t.m(i, i, k) -= tr;
    }
    return t;
  }

  PolyTensorField div() const { return symbolic_div(m); }
};

struct MicrostressDiscrepancy {
  double raw = 0.0;        ///< max |Div m + mu Lc^2 Curl Curl eps|
  double projected = 0.0;  ///< max |Div m~ + mu Lc^2 dev Curl Curl eps|
  double trace = 0.0;      ///< max |tr Div m~|
  double max() const { return std::max({raw, projected, trace}); }
};

/// Evaluates the identity at `samples` random points of the unit cube.
inline MicrostressDiscrepancy microstress_identity_check(const MaterialParams& prm, const PolyTensorField& eps,
                                                         int samples = 20, std::uint64_t seed = 5) {
  const double c = prm.mu * prm.Lc * prm.Lc;
  const MicroStress ms = MicroStress::from_plastic_strain(prm, eps);
  const PolyTensorField dm = ms.div();
  const PolyTensorField dmt = ms.trace_free().div();
  const PolyTensorField cc = symbolic_curl_curl(eps);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  MicrostressDiscrepancy d;
  for (int s = 0; s < samples; ++s) {
    const Vec3 x{U(rng), U(rng), U(rng)};
    const Mat3 ccx = cc.at(x);
    d.raw = std::max(d.raw, norm(dm.at(x) + c * ccx));
    const Mat3 t = dmt.at(x);
    d.projected = std::max(d.projected, norm(t + c * dev(ccx)));
    d.trace = std::max(d.trace, std::abs(trace(t)));
  }
  return d;
}

}  // namespace gradplast::oracle
