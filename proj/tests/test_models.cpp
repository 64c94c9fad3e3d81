#include <gtest/gtest.h>

#include "gradplast/discretization.hpp"
#include "gradplast/models.hpp"
#include "gradplast/prox.hpp"
#include "support.hpp"

using namespace gradplast;
using namespace gp_test;

TEST(Variants, Flags) {
  struct Row {
    VariantTag tag;
    bool kin, iso, irrot, flow;
    PlasticKind kind;
  };
  for (const Row& r : {Row{VariantTag::KinSpin, true, false, false, true, PlasticKind::Distortion},
                       Row{VariantTag::IsoSpin, false, true, false, true, PlasticKind::Distortion},
                       Row{VariantTag::IsoIrrot, false, true, true, true, PlasticKind::Strain},
                       Row{VariantTag::KinIrrot, true, false, true, true, PlasticKind::Strain},
                       Row{VariantTag::Micromorphic, true, false, false, false, PlasticKind::Distortion}}) {
    const ModelVariant v = variant(r.tag, material(0.5, 0.5, 0.1));
    EXPECT_EQ(v.kinematic(), r.kin);
    EXPECT_EQ(v.isotropic(), r.iso);
    EXPECT_EQ(v.irrotational(), r.irrot);
    EXPECT_EQ(v.has_flow_law(), r.flow);
    EXPECT_EQ(v.kind(), r.kind);
    EXPECT_EQ(variant_from_string(to_string(r.tag)), r.tag);
  }
  EXPECT_THROW(variant_from_string("kin"), ValidationError);
}

TEST(Variants, HardeningModulusMustBePositive) {
  try {
    variant(VariantTag::KinSpin, material(0.0, 0.5, 0.1)).validate();
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("k1"), std::string::npos);
  }
  try {
    variant(VariantTag::IsoIrrot, material(0.5, 0.0, 0.1)).validate();
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("k2"), std::string::npos);
  }
  EXPECT_NO_THROW(variant(VariantTag::IsoSpin, material(0.0, 0.5, 0.0)).validate());
}

TEST(YieldFunction, SpinSeesSkewPartIrrotationalDoesNot) {
  const Mat3 w = anti({0.0, 0.0, 0.02});
  const auto spin = variant(VariantTag::KinSpin, material(0.5, 0.0, 0.0));
  const auto irrot = variant(VariantTag::KinIrrot, material(0.5, 0.0, 0.0));
  EXPECT_NEAR(yield_value(spin, w, 0.0), norm(w) - 0.01, 1e-15);
  EXPECT_NEAR(yield_value(irrot, w, 0.0), -0.01, 1e-15);
  // spherical part never matters
  EXPECT_NEAR(yield_value(spin, 5.0 * Mat3::identity(), 0.0), -0.01, 1e-14);
}

TEST(YieldFunction, IsotropicRadiusGrows) {
  const auto iso = variant(VariantTag::IsoSpin, material(0.0, 0.5, 0.0));
  Mat3 s = Mat3::zero();
  s(0, 1) = s(1, 0) = 0.02;
  EXPECT_NEAR(yield_value(iso, s, 0.0), norm(s) - 0.01, 1e-15);
  EXPECT_NEAR(yield_value(iso, s, 0.1), norm(s) - 0.01 - 0.05, 1e-15);
}

TEST(Dissipation, ClosedForms) {
  const auto kin = variant(VariantTag::KinSpin, material(0.5, 0.0, 0.0));
  const auto iso = variant(VariantTag::IsoSpin, material(0.0, 0.7, 0.0));
  const auto micro = variant(VariantTag::Micromorphic, material(0.5, 0.0, 0.0));
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> U(0.0, 2.0);
  for (int t = 0; t < 100; ++t) {
    const double m = U(rng), g = U(rng);
    EXPECT_DOUBLE_EQ(incremental_dissipation(kin, m, g), 0.01 * m);
    const double h = 0.7;
    const double direct = 0.01 * m + 0.5 * h * ((g + m) * (g + m) - g * g);
    EXPECT_NEAR(incremental_dissipation(iso, m, g), direct, 1e-13 * direct);
    EXPECT_EQ(incremental_dissipation(micro, m, g), 0.0);
  }
  EXPECT_EQ(incremental_dissipation(kin, 0.0, 1.0), 0.0);
}

TEST(Dissipation, PositivelyHomogeneousForKinematic) {
  const auto kin = variant(VariantTag::KinSpin, material(0.5, 0.0, 0.0));
  std::mt19937_64 rng(52);
  for (int t = 0; t < 50; ++t) {
    const Mat3 q = random_mat(rng);
    EXPECT_NEAR(incremental_dissipation(kin, 3.5 * q, 0.0), 3.5 * incremental_dissipation(kin, q, 0.0), 1e-15);
  }
}

namespace {

// Brute-force minimizer of 1/(2 tau) (m - |z|)^2 + D(m) over m >= 0 by golden section.
double prox_reference(const ModelVariant& v, double zn, double tau, double g) {
  auto f = [&](double m) { return (m - zn) * (m - zn) / (2.0 * tau) + incremental_dissipation(v, m, g); };
  double a = 0.0, b = zn;
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200; ++it) {
    const double c = b - r * (b - a), d = a + r * (b - a);
    (f(c) < f(d) ? b : a) = f(c) < f(d) ? d : c;
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST(Prox, MatchesBruteForce) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto kin = variant(VariantTag::KinSpin, material(0.5, 0.0, 0.0));
  const auto iso = variant(VariantTag::IsoSpin, material(0.0, 0.8, 0.0));
  for (int t = 0; t < 200; ++t) {
    const double zn = 0.05 * U(rng), tau = 2.0 * U(rng) + 0.01, g = U(rng);
    for (const auto* v : {&kin, &iso})
      EXPECT_NEAR(prox_magnitude(*v, zn, tau, g), prox_reference(*v, zn, tau, g), 1e-9);
  }
}

TEST(Prox, DirectionThresholdAndNonExpansive) {
  const auto kin = variant(VariantTag::KinSpin, material(0.5, 0.0, 0.0));
  std::mt19937_64 rng(54);
  for (int t = 0; t < 200; ++t) {
    const Mat3 a = random_mat(rng, 0.02), b = random_mat(rng, 0.02);
    const Mat3 pa = prox_dissipation(kin, a, 1.0, 0.0), pb = prox_dissipation(kin, b, 1.0, 0.0);
    EXPECT_LE(norm(pa - pb), norm(a - b) * (1.0 + 1e-12));
    if (norm(a) <= 0.01) {
      EXPECT_EQ(pa, Mat3::zero());
    } else {
      EXPECT_NEAR(norm(pa), norm(a) - 0.01, 1e-15);
      EXPECT_LE(norm(pa - (norm(pa) / norm(a)) * a), 1e-15);
    }
  }
}

TEST(Prox, VanishingYieldIsIdentityInfiniteYieldFreezes) {
  std::mt19937_64 rng(55);
  for (int t = 0; t < 50; ++t) {
    const Mat3 z = random_mat(rng);
    const auto soft = variant(VariantTag::KinSpin, MaterialParams::from_lame(1.0, 1.5, 0.5, 0.0, 0.0, 1e-300));
    EXPECT_LE(norm(prox_dissipation(soft, z, 1.0, 0.0) - z), 1e-15 * norm(z));
    const auto rigid = variant(VariantTag::KinSpin, MaterialParams::from_lame(1.0, 1.5, 0.5, 0.0, 0.0, INFINITY));
    EXPECT_EQ(prox_dissipation(rigid, z, 1.0, 0.0), Mat3::zero());
  }
}

TEST(Energy, QuadratureMatchesAssembledForm) {
  const Grid g = Grid::cube(3, 1.0);
  const auto v = variant(VariantTag::KinSpin, material(0.5, 0.0, 0.3));
  const auto F = assemble_full(g, v.params);
  std::mt19937_64 rng(56);
  SimState s = SimState::zero(g);
  for (auto& u : s.u) u = random_vec(rng);
  for (auto& p : s.p) p = dev(random_mat(rng));
  const Vec u = flatten(s.u), p = flatten(s.p);
  const SpMat A = F.Kel + v.curl_coefficient() * F.Kcurl + v.sym_coefficient() * F.Ksym;
  const double assembled = 0.5 * u.dot(F.Kuu * u) + p.dot(F.Kpu * u) + 0.5 * p.dot(A * p);
  const EnergySplit e = total_energy(g, v, s);
  EXPECT_NEAR(e.elastic + e.defect + e.hardening, assembled, 1e-12 * assembled);
  EXPECT_GT(e.defect, 0.0);
  EXPECT_EQ(e.load, 0.0);
}

TEST(Energy, IsotropicHardeningUsesGamma) {
  const Grid g = Grid::cube(2, 1.0);
  const auto v = variant(VariantTag::IsoSpin, material(0.0, 0.4, 0.0));
  SimState s = SimState::zero(g);
  for (auto& x : s.gamma) x = 0.5;
  EXPECT_NEAR(total_energy(g, v, s).hardening, 0.5 * 0.4 * 0.25 * g.volume(), 1e-15);
}

TEST(Energy, BodyForceWork) {
  const Grid g = Grid::cube(2, 2.0);
  const auto v = variant(VariantTag::KinSpin, material(0.5, 0.0, 0.0));
  SimState s = SimState::zero(g);
  for (auto& u : s.u) u = {1.0, 2.0, 0.0};
  EXPECT_NEAR(total_energy(g, v, s, {0.5, 0.25, 3.0}).load, -(0.5 + 0.5) * 8.0, 1e-13);
}

TEST(Stress, HomogeneousFieldsAndSymmetry) {
  const Grid g = Grid::cube(2, 1.0);
  const auto v = variant(VariantTag::KinSpin, material(0.5, 0.0, 0.0));
  std::mt19937_64 rng(57);
  const Mat3 H = random_mat(rng, 0.01);
  const VectorField u = interpolate_nodal<Vec3>(g, [&](const Vec3& x) { return matvec(H, x); });
  // all of grad u carried plastically: no stress
  for (const auto& m : cauchy_stress(g, v, u, TensorField(g.node_count(), H))) EXPECT_LE(norm(m), 1e-15);
  // skew p never stresses
  const TensorField p(g.node_count(), skew(random_mat(rng)));
  const Mat3 expect = elasticity_apply(v.params, H);
  for (const auto& m : cauchy_stress(g, v, u, p)) {
    EXPECT_LE(norm(m - expect), 1e-15);
    EXPECT_EQ(m, transpose(m));
  }
}

TEST(DiscretizationTest, SmoothEnergyMatchesQuadrature) {
  const Grid g = Grid::cube(3, 1.0);
  BoundaryConfig bc = sheared_layer();
  const Discretization d(g, bc, variant(VariantTag::KinSpin, material(0.5, 0.0, 0.2)));
  std::mt19937_64 rng(58);
  std::normal_distribution<double> N;
  Vec uf(d.nu()), pc(d.np());
  for (auto& x : uf) x = 0.01 * N(rng);
  for (auto& x : pc) x = 0.01 * N(rng);
  const Load load{0.03, {0.1, -0.2, 0.3}};
  SimState s = SimState::zero(g);
  s.u = d.u_field(uf, load.amplitude);
  s.p = d.pspace().from_coords(pc);
  const double ref = total_energy(g, d.variant(), s, load.body_force).total();
  EXPECT_NEAR(d.smooth_energy(uf, pc, load), ref, 1e-12 * std::abs(ref));
}

TEST(DiscretizationTest, GradientsMatchFiniteDifferences) {
  const Grid g = Grid::cube(2, 1.0);
  const Discretization d(g, sheared_layer(), variant(VariantTag::KinSpin, material(0.5, 0.0, 0.2)));
  std::mt19937_64 rng(59);
  std::normal_distribution<double> N;
  Vec uf(d.nu()), pc(d.np());
  for (auto& x : uf) x = N(rng);
  for (auto& x : pc) x = N(rng);
  const Load load{0.7, {0.1, 0.0, -0.4}};
  const Vec gu = d.grad_u(uf, pc, load), gp = d.grad_p(uf, pc, load);
  const double h = 1e-4;
  // quadratic energy: central differences are exact up to rounding
  for (int k = 0; k < d.nu(); k += 3) {
    Vec a = uf, b = uf;
    a[k] += h;
    b[k] -= h;
    EXPECT_NEAR((d.smooth_energy(a, pc, load) - d.smooth_energy(b, pc, load)) / (2 * h), gu[k], 1e-8);
  }
  for (int k = 0; k < d.np(); k += 5) {
    Vec a = pc, b = pc;
    a[k] += h;
    b[k] -= h;
    EXPECT_NEAR((d.smooth_energy(uf, a, load) - d.smooth_energy(uf, b, load)) / (2 * h), gp[k], 1e-8);
  }
}

TEST(DiscretizationTest, EshelbyStressOfHomogeneousState) {
  const Grid g = Grid::cube(2, 1.0);
  const auto v = variant(VariantTag::KinSpin, material(0.5, 0.0, 0.3));
  const Discretization d(g, homogeneous_shear(), v);
  const double amp = 0.02;
  Mat3 p0 = Mat3::zero();
  p0(0, 1) = p0(1, 0) = 0.004;
  p0(0, 2) = 0.001;
  SimState s = SimState::zero(g);
  s.u = interpolate_nodal<Vec3>(g, [&](const Vec3& x) { return matvec(amp * Mat3::unit(0, 1), x); });
  s.p.assign(g.node_count(), p0);
  const Mat3 sigma = elasticity_apply(v.params, amp * Mat3::unit(0, 1) - p0);
  const Mat3 expect = sigma - v.params.mu * v.params.k1 * dev(sym(p0));
  for (const auto& m : eshelby_stress(d, s, {amp, {0.0, 0.0, 0.0}})) EXPECT_LE(norm(m - expect), 1e-13);
}

TEST(DiscretizationTest, DirichletLift) {
  const Grid g = Grid::cube(2, 1.0, {1.0, 0.0, 0.0});
  const Discretization d(g, sheared_layer(), variant(VariantTag::KinSpin, material(0.5, 0.0, 0.0)));
  const VectorField u = d.u_field(Vec::Zero(d.nu()), 0.5);
  for (int v = 0; v < g.node_count(); ++v) {
    const auto f = g.node_faces(v) & sheared_layer().gamma_faces;
    const double z = g.node_coords(v)[2];
    EXPECT_DOUBLE_EQ(u[v][0], f.empty() ? 0.0 : 0.5 * z);
    EXPECT_EQ(u[v][1], 0.0);
  }
}
