#pragma once

// Self-checks of the reference computations, shared by the test suite and
// the oracle-check subcommand.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gradplast/oracles/microstress.hpp"
#include "gradplast/oracles/poly.hpp"
#include "gradplast/oracles/radial_return.hpp"

namespace gradplast::oracle {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
};

/// Pure shear path with eps_12 = eps_21 = s/2 at each entry of `s`.
inline std::vector<Mat3> shear_path(const std::vector<double>& s) {
  std::vector<Mat3> path;
  path.reserve(s.size());
  for (double v : s) {
    Mat3 e = Mat3::zero();
    e(0, 1) = e(1, 0) = 0.5 * v;
    path.push_back(e);
  }
  return path;
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * (i + 1) / n;
  return v;
}

/// Shear amplitude (engineering) at which the elastic predictor first exceeds
/// the yield radius, by bisection on the predictor of the oracle.
inline double shear_yield_onset(const MaterialParams& prm) {
  double lo = 0.0, hi = 1.0;
  while (radial_return_0d(prm, shear_path({hi}), Hardening::Kinematic)[0].eps_p == Mat3::zero()) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const bool plastic = !(radial_return_0d(prm, shear_path({mid}), Hardening::Kinematic)[0].eps_p == Mat3::zero());
    (plastic ? hi : lo) = mid;
  }
  return hi;
}

/// |dev sigma| at the first plastic step of each monotone leg.
inline std::pair<double, double> bauschinger_onsets(const MaterialParams& prm, double amplitude, int steps) {
  std::vector<double> s = linspace(0.0, amplitude, steps);
  const auto back = linspace(amplitude, -amplitude, 2 * steps);
  s.insert(s.end(), back.begin(), back.end());
  const auto out = radial_return_0d(prm, shear_path(s), Hardening::Kinematic);
  double forward = -1.0, reverse = -1.0;
  double last_g = 0.0;
  for (int k = 0; k < static_cast<int>(out.size()); ++k) {
    const bool flowed = out[k].gamma > last_g;
    last_g = out[k].gamma;
    if (!flowed) continue;
    if (k < steps && forward < 0.0) forward = norm(dev(out[k].sigma));
    if (k >= steps && reverse < 0.0) reverse = norm(dev(out[k].sigma));
  }
  return {forward, reverse};
}

inline std::vector<CheckResult> run_oracle_self_tests() {
  std::vector<CheckResult> r;
  auto add = [&](std::string name, double value, double limit) {
    r.push_back({std::move(name), value <= limit, value, limit});
  };
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto point = [&] { return Vec3{U(rng), U(rng), U(rng)}; };

  {  // Curl grad v = 0
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const PolyVector v{Poly::random(rng, 3), Poly::random(rng, 3), Poly::random(rng, 3)};
      const PolyTensorField c = symbolic_curl(symbolic_grad(v));
      for (int s = 0; s < 10; ++s) worst = std::max(worst, norm(c.at(point())));
    }
    add("curl of gradient vanishes", worst, 1e-13);
  }
  {  // rows a_i x x
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      PolyTensorField P;
      Mat3 expect;
      for (int i = 0; i < 3; ++i) {
        const Vec3 a{2 * U(rng) - 1, 2 * U(rng) - 1, 2 * U(rng) - 1};
        P(i, 0) = a[1] * Poly::coord(2) - a[2] * Poly::coord(1);
        P(i, 1) = a[2] * Poly::coord(0) - a[0] * Poly::coord(2);
        P(i, 2) = a[0] * Poly::coord(1) - a[1] * Poly::coord(0);
        for (int j = 0; j < 3; ++j) expect(i, j) = 2.0 * a[j];
      }
      const PolyTensorField c = symbolic_curl(P);
      for (int s = 0; s < 10; ++s) worst = std::max(worst, norm(c.at(point()) - expect));
    }
    add("curl of rotation rows is twice the axis", worst, 1e-13);
  }
  {  // finite differences
    double worst = 0.0;
    const double h = 1e-5;
    for (int t = 0; t < 10; ++t) {
      const PolyTensorField P = random_tensor_field(rng, 3);
      const PolyTensorField c = symbolic_curl(P);
      const Vec3 x = point();
      Grad3 g{};
      for (int k = 0; k < 3; ++k) {
        Vec3 xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        const Mat3 d = (1.0 / (2.0 * h)) * (P.at(xp) - P.at(xm));
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) g[i](j, k) = d(i, j);
      }
      worst = std::max(worst, norm(c.at(x) - L_apply(g)));
    }
    add("symbolic curl matches central differences", worst, 1e-7);
  }
  {
    MaterialParams prm;
    prm.mu = 1.3;
    prm.Lc = 0.7;
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) worst = std::max(worst, microstress_identity_check(prm, random_dev_sym_field(rng, 2)).max());
    add("microstress divergence identity (quadratic fields)", worst, 1e-12);
    worst = 0.0;
    for (int t = 0; t < 5; ++t) worst = std::max(worst, microstress_identity_check(prm, random_dev_sym_field(rng, 3)).max());
    add("microstress divergence identity (cubic fields)", worst, 1e-12);
  }
  {
    bool threw = false;
    try {
      (void)(Poly::coord(0) * Poly::coord(1) * Poly::coord(2) * Poly::coord(0));
    } catch (const DegreeOverflow&) {
      threw = true;
    }
    add("degree cap enforced", threw ? 0.0 : 1.0, 0.0);
  }

  const MaterialParams prm = MaterialParams::from_lame(1.0, 1.5, 0.5, 0.5, 0.0, 0.01);
  {
    const auto s = linspace(0.0, 0.5 * 0.01 / std::sqrt(2.0), 10);
    const auto path = shear_path(s);
    const auto out = radial_return_0d(prm, path, Hardening::Kinematic);
    double worst = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k)
      worst = std::max({worst, norm(out[k].eps_p), norm(out[k].sigma - linear_stress(prm, path[k]))});
    add("elastic path stays elastic", worst, 0.0);
  }
  {
    const double onset = shear_yield_onset(prm);
    const double expect = prm.sigma_y / (std::sqrt(2.0) * prm.mu);
    add("shear yield onset at sqrt(2) mu s = sigma_y", std::abs(onset - expect) / expect, 1e-12);
  }
  {
    const auto [fwd, rev] = bauschinger_onsets(prm, 0.05, 2000);
    add("reverse yielding below forward onset", rev < fwd && rev > 0.0 ? 0.0 : 1.0, 0.0);
  }
  {
    MaterialParams perfect = prm;
    perfect.k1 = 0.0;
    perfect.k2 = 0.0;
    const auto out = radial_return_0d(perfect, shear_path(linspace(0.0, 0.1, 50)), Hardening::Kinematic);
    double excess = 0.0, plateau = 0.0;
    for (const auto& o : out) excess = std::max(excess, norm(dev(o.sigma)) - perfect.sigma_y);
    plateau = std::abs(out.back().sigma(0, 1) - out[out.size() - 2].sigma(0, 1));
    add("perfect plasticity respects the yield radius", std::max(excess, 0.0), 1e-15);
    add("perfect plasticity stress plateau", plateau, 1e-15);
  }
  for (auto h : {Hardening::Kinematic, Hardening::Isotropic}) {
    const auto coarse = radial_return_0d(prm, shear_path(linspace(0.0, 0.08, 20)), h);
    const auto fine = radial_return_0d(prm, shear_path(linspace(0.0, 0.08, 40)), h);
    double worst = 0.0;
    for (std::size_t k = 0; k < coarse.size(); ++k) {
      const auto& a = coarse[k];
      const auto& b = fine[2 * k + 1];
      worst = std::max(worst, norm(a.sigma - b.sigma) / norm(a.sigma));
      if (norm(a.eps_p) > 0.0) worst = std::max(worst, norm(a.eps_p - b.eps_p) / norm(a.eps_p));
    }
    add(std::string("path refinement invariance (") + (h == Hardening::Kinematic ? "kinematic" : "isotropic") + ")", worst, 1e-10);
  }
  return r;
}

}  // namespace gradplast::oracle
