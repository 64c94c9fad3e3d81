#pragma once

#include <random>
#include <vector>

#include "gradplast/discretization.hpp"
#include "gradplast/oracles/poly.hpp"
#include "gradplast/solver.hpp"

namespace gp_test {

using namespace gradplast;

inline Mat3 random_mat(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> U(-scale, scale);
  Mat3 m;
  for (auto& v : m.a) v = U(rng);
  return m;
}

inline Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> U(-scale, scale);
  return {U(rng), U(rng), U(rng)};
}

inline double max_norm(const TensorField& f) {
  double m = 0.0;
  for (const auto& x : f) m = std::max(m, norm(x));
  return m;
}

inline double max_diff(const TensorField& a, const TensorField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, norm(a[i] - b[i]));
  return m;
}

inline double max_diff(const VectorField& a, const VectorField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, norm(a[i] - b[i]));
  return m;
}

inline double max_norm(const VectorField& f) {
  double m = 0.0;
  for (const auto& x : f) m = std::max(m, norm(x));
  return m;
}

/// Reference material: mu = 1, lambda = 1.5, sigma_y = 0.01.
inline MaterialParams material(double k1, double k2, double Lc) {
  return MaterialParams::from_lame(1.0, 1.5, k1, k2, Lc, 0.01);
}

inline ModelVariant variant(VariantTag tag, const MaterialParams& p, DefectForm form = DefectForm::Curl) {
  ModelVariant v;
  v.tag = tag;
  v.params = p;
  v.defect_form = form;
  return v;
}

/// Homogeneous shear: u = amp (x2 e1) on the whole boundary, no micro-hard faces.
inline BoundaryConfig homogeneous_shear() {
  BoundaryConfig bc;
  bc.gamma_faces = FaceSet::all();
  bc.micro_hard_faces = FaceSet::none();
  bc.displacement_gradient = Mat3::unit(0, 1);
  return bc;
}

/// Clamped-sheared layer: u = amp (x3 e1) on z faces, micro-hard z faces.
inline BoundaryConfig sheared_layer() {
  BoundaryConfig bc;
  bc.gamma_faces = FaceSet::from_name("zmin") | FaceSet::from_name("zmax");
  bc.micro_hard_faces = bc.gamma_faces;
  bc.displacement_gradient = Mat3::unit(0, 2);
  return bc;
}

/// Amplitudes of a load-reverse cycle: 0 -> a over n1 steps, then a -> -a over n2 steps.
inline std::vector<double> cycle(double a, int n1, int n2) {
  std::vector<double> v;
  for (int k = 1; k <= n1; ++k) v.push_back(a * k / n1);
  for (int k = 1; k <= n2; ++k) v.push_back(a - 2.0 * a * k / n2);
  return v;
}

inline std::vector<double> ramp(double from, double to, int n) {
  std::vector<double> v;
  for (int k = 1; k <= n; ++k) v.push_back(from + (to - from) * k / n);
  return v;
}

inline std::vector<Load> loads(const std::vector<double>& amps) {
  std::vector<Load> l;
  for (double a : amps) l.push_back({a, {0.0, 0.0, 0.0}});
  return l;
}

/// Max over Gauss points of the relative deviation of a stress field from a constant.
inline double stress_deviation(const std::vector<Mat3>& s, const Mat3& ref) {
  double m = 0.0;
  for (const auto& x : s) m = std::max(m, norm(x - ref));
  return m / std::max(norm(ref), 1e-300);
}

inline TensorField nodal(const Grid& g, const oracle::PolyTensorField& P) {
  return interpolate_nodal<Mat3>(g, [&](const Vec3& x) { return P.at(x); });
}

}  // namespace gp_test
