#include <gtest/gtest.h>

#include "gradplast/assembly.hpp"
#include "gradplast/discretization.hpp"
#include "gradplast/oracles/poly.hpp"
#include "support.hpp"

using namespace gradplast;
using namespace gp_test;
using gradplast::oracle::Poly;
using gradplast::oracle::PolyTensorField;
using gradplast::oracle::PolyVector;

namespace {

Mat3 gradient_at_gauss(const Grid& g, const VectorField& u, int cell, int q) {
  const CellShape s = shape_gradients(g, cell);
  return vector_gradient_at(g, u, g.cell_nodes(cell), s.xi[q]);
}

bool exactly_symmetric(const SpMat& A) {
  const SpMat At = A.transpose();
  return (Eigen::MatrixXd(A) - Eigen::MatrixXd(At)).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

TEST(GridTest, CountsAndIndexing) {
  Grid g;
  g.n = {2, 3, 4};
  g.h = {0.5, 0.25, 0.1};
  EXPECT_EQ(g.node_count(), 3 * 4 * 5);
  EXPECT_EQ(g.cell_count(), 24);
  for (int v = 0; v < g.node_count(); ++v) {
    const auto ijk = g.node_ijk(v);
    EXPECT_EQ(g.node_index(ijk[0], ijk[1], ijk[2]), v);
  }
  EXPECT_THROW(g.cell_nodes(24), IndexOutOfRange);
  EXPECT_THROW(g.cell_nodes(-1), IndexOutOfRange);
  EXPECT_THROW(shape_gradients(g, 24), IndexOutOfRange);
  double w = 0.0;
  for (int v = 0; v < g.node_count(); ++v) w += g.lumped_weight(v);
  EXPECT_NEAR(w, g.volume(), 1e-15);
  Grid bad = g;
  bad.n[1] = 0;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(ShapeGradients, LinearReproduction) {
  const Grid g = Grid::cube(3, 1.0);
  const VectorField u = interpolate_nodal<Vec3>(g, [](const Vec3& x) { return Vec3{x[0], 0.0, 0.0}; });
  for (int c = 0; c < g.cell_count(); ++c)
    for (int q = 0; q < kGaussPerCell; ++q) {
      const Mat3 G = gradient_at_gauss(g, u, c, q);
      EXPECT_NEAR(G(0, 0), 1.0, 1e-14);
      EXPECT_LE(norm(G - Mat3::unit(0, 0)), 1e-14);
    }
}

TEST(ShapeGradients, ConstantFieldHasZeroGradient) {
  const Grid g = Grid::cube(2, 0.7, {0.1, -0.3, 2.0});
  const VectorField u(g.node_count(), Vec3{0.3, -1.1, 7.0});
  for (int c = 0; c < g.cell_count(); ++c)
    for (int q = 0; q < kGaussPerCell; ++q) EXPECT_EQ(gradient_at_gauss(g, u, c, q), Mat3::zero());
}

TEST(ShapeGradients, FirstOrderConvergenceOnQuadratics) {
  std::mt19937_64 rng(21);
  const PolyVector v{Poly::random(rng, 2), Poly::random(rng, 2), Poly::random(rng, 2)};
  const PolyTensorField G = oracle::symbolic_grad(v);
  auto error = [&](int n) {
    const Grid g = Grid::cube(n, 1.0);
    const VectorField u = interpolate_nodal<Vec3>(g, [&](const Vec3& x) { return Vec3{v[0](x), v[1](x), v[2](x)}; });
    const CellShape s = reference_shape(g);
    double e = 0.0;
    for (int c = 0; c < g.cell_count(); ++c)
      for (int q = 0; q < kGaussPerCell; ++q)
        e = std::max(e, norm(gradient_at_gauss(g, u, c, q) - G.at(g.cell_point(c, s.xi[q]))));
    return e;
  };
  const double e1 = error(4), e2 = error(8), e3 = error(16);
  EXPECT_GT(e1 / e2, 1.8);
  EXPECT_GT(e2 / e3, 1.8);
}

TEST(DiscreteCurl, ConstantFieldsAreExactlyCurlFree) {
  const Grid g = Grid::cube(3, 1.0);
  std::mt19937_64 rng(22);
  for (const Mat3& A : {random_mat(rng), skew(random_mat(rng))}) {
    const auto C = discrete_curl(g, TensorField(g.node_count(), A));
    for (const auto& c : C) EXPECT_EQ(c, Mat3::zero());
  }
}

TEST(DiscreteCurl, InterpolatedGradientsAreCurlFree) {
  const Grid g = Grid::cube(3, 1.0, {-0.5, 0.25, 0.0});
  std::mt19937_64 rng(23);
  for (int t = 0; t < 5; ++t) {
    PolyVector v{Poly::random(rng, 2), Poly::random(rng, 2), Poly::random(rng, 2)};
    // trilinear gradients too: xyz has a bilinear gradient
    v[t % 3] += (0.5 + t) * Poly::monomial(1, 1, 1);
    const TensorField P = nodal(g, oracle::symbolic_grad(v));
    double worst = 0.0;
    for (const auto& c : discrete_curl(g, P)) worst = std::max(worst, norm(c));
    EXPECT_LE(worst, 1e-12);
  }
}

TEST(DiscreteCurl, RotationRows) {
  const Grid g = Grid::cube(2, 1.0);
  std::mt19937_64 rng(24);
  std::array<Vec3, 3> a{random_vec(rng), random_vec(rng), random_vec(rng)};
  const TensorField P = interpolate_nodal<Mat3>(g, [&](const Vec3& x) {
    Mat3 m;
    for (int i = 0; i < 3; ++i) {
      const Vec3 r = cross(a[i], x);
      for (int j = 0; j < 3; ++j) m(i, j) = r[j];
    }
    return m;
  });
  for (const auto& c : discrete_curl(g, P))
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_NEAR(c(i, j), 2.0 * a[i][j], 1e-13);
}

TEST(Assembly, BlocksAreExactlySymmetric) {
  const Grid g = Grid::cube(2, 1.0);
  const auto prm = material(0.5, 0.0, 0.2);
  for (auto kind : {PlasticKind::Distortion, PlasticKind::Strain, PlasticKind::Full})
    for (auto tag : {BlockTag::Kuu, BlockTag::KppElastic, BlockTag::KppCurl, BlockTag::KppSym, BlockTag::Mass,
                     BlockTag::LumpedMass})
      EXPECT_TRUE(exactly_symmetric(assemble_block(g, prm, sheared_layer(), kind, tag)));
  const auto F = assemble_full(g, prm);
  for (const SpMat* A : {&F.Kuu, &F.Kel, &F.Kcurl, &F.Ksym, &F.M}) EXPECT_TRUE(exactly_symmetric(*A));
}

TEST(Assembly, RigidTranslationsAreInTheKernel) {
  const Grid g = Grid::cube(1, 1.0);
  const auto F = assemble_full(g, material(0.5, 0.0, 0.2));
  for (int d = 0; d < 3; ++d) {
    Vec t = Vec::Zero(3 * g.node_count());
    for (int v = 0; v < g.node_count(); ++v) t[3 * v + d] = 1.0;
    EXPECT_LE((F.Kuu * t).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((F.Kpu * t).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Assembly, ConstantSkewFieldHasNoCurlEnergy) {
  const Grid g = Grid::cube(3, 1.0);
  const auto F = assemble_full(g, material(0.5, 0.0, 0.2));
  const Vec x = flatten(TensorField(g.node_count(), anti({0.3, -0.2, 0.9})));
  EXPECT_LE(std::abs(x.dot(F.Kcurl * x)), 1e-14);
  EXPECT_LE(std::abs(x.dot(F.Ksym * x)), 1e-14);
}

TEST(Assembly, MicrostressRouteEqualsCurlRoute) {
  const Grid g = Grid::cube(2, 1.0);
  const auto prm = material(0.5, 0.0, 0.2);
  const auto A = assemble_full(g, prm, DefectForm::Curl);
  const auto B = assemble_full(g, prm, DefectForm::Microstress);
  const Eigen::MatrixXd d = Eigen::MatrixXd(A.Kcurl) - Eigen::MatrixXd(B.Kcurl);
  EXPECT_LE(d.cwiseAbs().maxCoeff(), 1e-13 * Eigen::MatrixXd(A.Kcurl).cwiseAbs().maxCoeff());
}

TEST(Assembly, CoerciveOnConstrainedSpace) {
  const Grid g = Grid::cube(2, 1.0);
  BoundaryConfig bc;
  bc.gamma_faces = FaceSet::all();
  const Discretization d(g, bc, variant(VariantTag::KinSpin, material(0.5, 0.0, 0.2)));
  std::mt19937_64 rng(25);
  std::normal_distribution<double> N;
  for (int t = 0; t < 50; ++t) {
    Vec u(d.nu()), p(d.np());
    for (auto& x : u) x = N(rng);
    for (auto& x : p) x = N(rng);
    const double a = u.dot(d.blocks().Kuu * u) + 2.0 * u.dot(d.blocks().Kup * p) + p.dot(d.App() * p);
    EXPECT_GT(a, 0.0);
  }
}

TEST(Assembly, KinematicWithoutBackstressIsSingular) {
  const Grid g = Grid::cube(1, 1.0);
  EXPECT_THROW(Discretization(g, sheared_layer(), variant(VariantTag::KinSpin, material(0.0, 0.0, 0.2))),
               SingularBlock);
}

TEST(Assembly, AssembledAndQuadratureNormsAgree) {
  const Grid g = Grid::cube(3, 1.0);
  const auto F = assemble_full(g, material(0.5, 0.0, 0.2));
  std::mt19937_64 rng(26);
  TensorField P(g.node_count());
  for (auto& m : P) m = random_mat(rng);
  const Vec x = flatten(P);
  const double assembled = x.dot(F.M * x) + x.dot(F.Kcurl * x);
  double quad = 0.0;
  const CellShape s = reference_shape(g);
  for (int c = 0; c < g.cell_count(); ++c) {
    const auto nodes = g.cell_nodes(c);
    for (int q = 0; q < kGaussPerCell; ++q) {
      const Mat3 v = interpolate_at(s, q, P, nodes);
      const Mat3 cp = L_apply(tensor_gradient_at(g, P, nodes, s.xi[q]));
      quad += s.weight[q] * (frob(v, v) + frob(cp, cp));
    }
  }
  EXPECT_LE(std::abs(assembled - quad), 1e-12 * quad);
}

TEST(Assembly, ConstrainedFormsEqualUnconstrainedOnAdmissibleFields) {
  const Grid g = Grid::cube(2, 1.0);
  const auto F = assemble_full(g, material(0.5, 0.0, 0.2));
  const FaceSet hard = FaceSet::from_name("zmin") | FaceSet::from_name("xmax");
  std::mt19937_64 rng(29);
  std::normal_distribution<double> N;
  for (auto kind : {PlasticKind::Distortion, PlasticKind::Strain, PlasticKind::Full}) {
    const Blocks B = constrain(g, F, hard, kind, hard);
    for (int t = 0; t < 5; ++t) {
      Vec c(B.pspace.size());
      for (auto& x : c) x = N(rng);
      const Vec full = flatten(B.pspace.from_coords(c));
      for (auto [red, unc] : {std::pair{&B.Kcurl, &F.Kcurl}, std::pair{&B.Kel, &F.Kel}, std::pair{&B.M, &F.M}}) {
        const double a = c.dot(*red * c), b = full.dot(*unc * full);
        EXPECT_LE(std::abs(a - b), 1e-13 * std::abs(b));
      }
    }
  }
}

TEST(MicroHardMask, FaceNormalZeroesOtherColumns) {
  const Grid g = Grid::cube(2, 1.0);
  std::mt19937_64 rng(27);
  TensorField P(g.node_count());
  for (auto& m : P) m = random_mat(rng);
  const TensorField Q = apply_micro_hard_mask(g, FaceSet::from_name("zmax"), P);
  for (int v = 0; v < g.node_count(); ++v) {
    if (g.node_faces(v).contains(Face::ZMax)) {
      for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(norm(cross(row(Q[v], i), {0.0, 0.0, 1.0})), 0.0);
        EXPECT_EQ(Q[v](i, 2), P[v](i, 2));
      }
    } else {
      EXPECT_EQ(Q[v], P[v]);
    }
  }
  EXPECT_EQ(apply_micro_hard_mask(g, FaceSet::from_name("zmax"), Q), Q);
  const int centre = g.node_index(1, 1, 1);
  EXPECT_EQ(apply_micro_hard_mask(g, FaceSet::all(), P)[centre], P[centre]);
}

TEST(PlasticSpaceTest, BasesAreOrthonormalAndAdmissible) {
  const Grid g = Grid::cube(2, 1.0);
  for (auto kind : {PlasticKind::Distortion, PlasticKind::Strain, PlasticKind::Full}) {
    const PlasticSpace sp(g, kind, FaceSet::from_name("zmin") | FaceSet::from_name("ymax"));
    for (int v = 0; v < g.node_count(); ++v) {
      const auto& b = sp.basis(v);
      for (std::size_t i = 0; i < b.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) EXPECT_NEAR(frob(b[i], b[j]), i == j ? 1.0 : 0.0, 1e-15);
        if (kind != PlasticKind::Full) EXPECT_NEAR(trace(b[i]), 0.0, 1e-15);
        if (kind == PlasticKind::Strain) EXPECT_EQ(b[i], transpose(b[i]));
      }
      const FaceSet hard = g.node_faces(v) & sp.hard_faces();
      for (const auto& m : b) EXPECT_EQ(apply_micro_hard_mask(g, hard, TensorField(g.node_count(), m))[v], m);
    }
  }
  const PlasticSpace free_sp(g, PlasticKind::Distortion, FaceSet::none());
  EXPECT_EQ(free_sp.size(), 8 * g.node_count());
  EXPECT_EQ(PlasticSpace(g, PlasticKind::Strain, FaceSet::none()).size(), 5 * g.node_count());
}

TEST(PlasticSpaceTest, CoordinateRoundTrip) {
  const Grid g = Grid::cube(2, 1.0);
  const PlasticSpace sp(g, PlasticKind::Distortion, FaceSet::from_name("zmin"));
  std::mt19937_64 rng(28);
  Vec c(sp.size());
  for (auto& x : c) x = std::uniform_real_distribution<double>(-1, 1)(rng);
  const TensorField P = sp.from_coords(c);
  EXPECT_LE((sp.to_coords(P) - c).cwiseAbs().maxCoeff(), 1e-15);
  for (const auto& m : P) EXPECT_LE(std::abs(trace(m)), 1e-15);
}
