#pragma once

// Assembly of the quadratic-form blocks of the incremental problem on a
// structured grid. Unconstrained ("full") operators act on 3 displacement
// components and 9 plastic components per node; constrained blocks are
// obtained through the selection map of the free displacement DOFs and the
// orthonormal nodal basis of the plastic space.

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "gradplast/grid.hpp"
#include "gradplast/linalg.hpp"
#include "gradplast/plastic_space.hpp"
#include "gradplast/tensor.hpp"

namespace gradplast {

struct BoundaryConfig {
  /// Faces carrying the displacement Dirichlet condition (Γ).
  FaceSet gamma_faces = FaceSet().insert(Face::ZMin).insert(Face::ZMax);
  /// Prescribed displacement on Γ per unit load amplitude: u = H (x - origin).
  Mat3 displacement_gradient = Mat3::unit(0, 2);
  /// Faces with p x n = 0. Defaults to gamma_faces when unset.
  std::optional<FaceSet> micro_hard_faces;

  FaceSet hard_faces() const { return micro_hard_faces.value_or(gamma_faces); }

  void validate() const {
    if (gamma_faces.empty()) throw ValidationError("boundary: gamma_faces must be non-empty");
  }

  friend bool operator==(const BoundaryConfig&, const BoundaryConfig&) = default;
};

enum class DefectForm {
  Curl,         ///< <Curl p, Curl q>
  Microstress,  ///< 2 sum_i <skew grad p_i, grad q_i>, the microstress pairing
};

/// Unconstrained operators. All are exactly symmetric except Kpu.
struct FullOperators {
  SpMat Kuu;    ///< ∫ <C sym grad u, sym grad v>                 (3n x 3n)
  SpMat Kpu;    ///< -∫ <C sym grad u, sym q>  rows p, cols u     (9n x 3n)
  SpMat Kel;    ///< ∫ <C sym p, sym q>                           (9n x 9n)
  SpMat Kcurl;  ///< ∫ <Curl p, Curl q> (route per DefectForm)    (9n x 9n)
  SpMat Ksym;   ///< ∫ <sym p, sym q>                             (9n x 9n)
  SpMat M;      ///< ∫ <p, q> consistent                          (9n x 9n)
  Vec lumped;   ///< ∫ N_v per node                               (n)
};

namespace detail {

inline int pdof(int a, int i, int j) { return 9 * a + 3 * i + j; }

struct LocalMatrices {
  Eigen::MatrixXd Kuu, Kpu, Kel, Kcurl, Ksym, M;
};

inline LocalMatrices local_matrices(const Grid& grid, const MaterialParams& prm, DefectForm form) {
  const CellShape s = reference_shape(grid);
  LocalMatrices L;
  L.Kuu = Eigen::MatrixXd::Zero(24, 24);
  L.Kpu = Eigen::MatrixXd::Zero(72, 24);
  L.Kel = Eigen::MatrixXd::Zero(72, 72);
  L.Kcurl = Eigen::MatrixXd::Zero(72, 72);
  L.Ksym = Eigen::MatrixXd::Zero(72, 72);
  L.M = Eigen::MatrixXd::Zero(72, 72);
  for (int q = 0; q < kGaussPerCell; ++q) {
    const double w = s.weight[q];
    // grad of u-basis (a, d): e_d ⊗ grad N_a
    std::array<Mat3, 24> gu;
    for (int a = 0; a < 8; ++a)
      for (int d = 0; d < 3; ++d) gu[3 * a + d] = outer(Vec3{d == 0 ? 1.0 : 0.0, d == 1 ? 1.0 : 0.0, d == 2 ? 1.0 : 0.0}, s.dN[q][a]);
    // p-basis (a, ij): value N_a E_ij, gradient rows g[i'] = δ_ii' e_j ⊗ grad N_a
    std::array<Mat3, 72> pv;
    std::array<Grad3, 72> pg;
    std::array<Mat3, 72> pc;
    for (int a = 0; a < 8; ++a)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const int k = pdof(a, i, j);
          pv[k] = s.N[q][a] * Mat3::unit(i, j);
          Grad3 g{};
          for (int m = 0; m < 3; ++m) g[i](j, m) = s.dN[q][a][m];
          pg[k] = g;
          pc[k] = L_apply(g);
        }
    for (int r = 0; r < 24; ++r)
      for (int c = r; c < 24; ++c) L.Kuu(r, c) += w * elastic_pairing(prm, gu[r], gu[c]);
    for (int r = 0; r < 72; ++r)
      for (int c = 0; c < 24; ++c) L.Kpu(r, c) -= w * elastic_pairing(prm, gu[c], pv[r]);
    for (int r = 0; r < 72; ++r)
      for (int c = r; c < 72; ++c) {
        L.Kel(r, c) += w * elastic_pairing(prm, pv[r], pv[c]);
        L.Ksym(r, c) += w * frob(sym(pv[r]), sym(pv[c]));
        L.M(r, c) += w * frob(pv[r], pv[c]);
        L.Kcurl(r, c) += w * (form == DefectForm::Curl ? frob(pc[r], pc[c])
                                                       : curl_pairing_via_skew(pg[r], pg[c]));
      }
  }
  for (auto* m : {&L.Kuu, &L.Kel, &L.Ksym, &L.M, &L.Kcurl})
    for (Eigen::Index r = 0; r < m->rows(); ++r)
      for (Eigen::Index c = 0; c < r; ++c) (*m)(r, c) = (*m)(c, r);
  return L;
}

inline SpMat scatter(const Grid& grid, const Eigen::MatrixXd& local, int row_comp, int col_comp,
                     int rows, int cols) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(grid.cell_count()) * 64 * row_comp * col_comp / 2);
  for (int c = 0; c < grid.cell_count(); ++c) {
    const auto nodes = grid.cell_nodes(c);
    for (int a = 0; a < 8; ++a)
      for (int ra = 0; ra < row_comp; ++ra) {
        const int lr = row_comp * a + ra;
        const int gr = row_comp * nodes[a] + ra;
        for (int b = 0; b < 8; ++b)
          for (int cb = 0; cb < col_comp; ++cb) {
            const double v = local(lr, col_comp * b + cb);
            if (v != 0.0) trip.emplace_back(gr, col_comp * nodes[b] + cb, v);
          }
      }
  }
  SpMat K(rows, cols);
  K.setFromTriplets(trip.begin(), trip.end());
  K.makeCompressed();
  return K;
}

}  // namespace detail

inline FullOperators assemble_full(const Grid& grid, const MaterialParams& prm,
                                   DefectForm form = DefectForm::Curl) {
  const auto L = detail::local_matrices(grid, prm, form);
  const int n = grid.node_count();
  FullOperators F;
  F.Kuu = detail::scatter(grid, L.Kuu, 3, 3, 3 * n, 3 * n);
  F.Kpu = detail::scatter(grid, L.Kpu, 9, 3, 9 * n, 3 * n);
  F.Kel = detail::scatter(grid, L.Kel, 9, 9, 9 * n, 9 * n);
  F.Kcurl = detail::scatter(grid, L.Kcurl, 9, 9, 9 * n, 9 * n);
  F.Ksym = detail::scatter(grid, L.Ksym, 9, 9, 9 * n, 9 * n);
  F.M = detail::scatter(grid, L.M, 9, 9, 9 * n, 9 * n);
  F.lumped.resize(n);
  for (int v = 0; v < n; ++v) F.lumped[v] = grid.lumped_weight(v);
  return F;
}

/// Free displacement DOFs: every component of every node not on Γ.
struct DisplacementSpace {
  std::vector<int> free_dofs;      ///< free index -> full dof
  std::vector<int> full_to_free;   ///< full dof -> free index or -1

  DisplacementSpace() = default;
  DisplacementSpace(const Grid& grid, FaceSet gamma) {
    full_to_free.assign(3 * grid.node_count(), -1);
    for (int v = 0; v < grid.node_count(); ++v) {
      if (!(grid.node_faces(v) & gamma).empty()) continue;
      for (int d = 0; d < 3; ++d) {
        full_to_free[3 * v + d] = static_cast<int>(free_dofs.size());
        free_dofs.push_back(3 * v + d);
      }
    }
  }
  int size() const { return static_cast<int>(free_dofs.size()); }

  SpMat selection(int full_size) const {
    std::vector<Eigen::Triplet<double>> t;
    for (int k = 0; k < size(); ++k) t.emplace_back(free_dofs[k], k, 1.0);
    SpMat S(full_size, size());
    S.setFromTriplets(t.begin(), t.end());
    return S;
  }
};

/// Map from plastic coordinates to full 9-per-node components.
inline SpMat plastic_embedding(const PlasticSpace& space) {
  std::vector<Eigen::Triplet<double>> t;
  for (int v = 0; v < space.node_count(); ++v) {
    const auto& b = space.basis(v);
    for (std::size_t m = 0; m < b.size(); ++m)
      for (int k = 0; k < 9; ++k)
        if (b[m].a[k] != 0.0) t.emplace_back(9 * v + k, space.offset(v) + static_cast<int>(m), b[m].a[k]);
  }
  SpMat P(9 * space.node_count(), space.size());
  P.setFromTriplets(t.begin(), t.end());
  return P;
}

/// Restriction of a symmetric full operator to constrained coordinates.
inline SpMat restrict_sym(const SpMat& K, const SpMat& P) {
  SpMat R = SpMat(P.transpose()) * K * P;
  return symmetrized(R);
}

enum class BlockTag { Kuu, Kup, KppElastic, KppCurl, KppSym, Mass, LumpedMass };

/// Constrained blocks of the bilinear form with unit coefficients.
struct Blocks {
  DisplacementSpace uspace;
  PlasticSpace pspace;
  SpMat Kuu;    ///< free u x free u
  SpMat Kup;    ///< free u x p coords
  SpMat Kel;    ///< p x p
  SpMat Kcurl;  ///< p x p
  SpMat Ksym;   ///< p x p
  SpMat M;      ///< p x p consistent
  Vec w;        ///< lumped weight per p coordinate
  SpMat Su;     ///< full u <- free u
  SpMat Pp;     ///< full p <- p coords
};

inline Blocks constrain(const Grid& grid, const FullOperators& F, FaceSet gamma, PlasticKind kind,
                        FaceSet hard) {
  Blocks B;
  B.uspace = DisplacementSpace(grid, gamma);
  B.pspace = PlasticSpace(grid, kind, hard);
  B.Su = B.uspace.selection(3 * grid.node_count());
  B.Pp = plastic_embedding(B.pspace);
  B.Kuu = restrict_sym(F.Kuu, B.Su);
  B.Kup = SpMat(B.Su.transpose()) * SpMat(F.Kpu.transpose()) * B.Pp;
  B.Kel = restrict_sym(F.Kel, B.Pp);
  B.Kcurl = restrict_sym(F.Kcurl, B.Pp);
  B.Ksym = restrict_sym(F.Ksym, B.Pp);
  B.M = restrict_sym(F.M, B.Pp);
  B.w.resize(B.pspace.size());
  for (int v = 0; v < grid.node_count(); ++v)
    for (int m = 0; m < B.pspace.dim(v); ++m) B.w[B.pspace.offset(v) + m] = F.lumped[v];
  return B;
}

/// One constrained block with unit coefficients.
inline SpMat assemble_block(const Grid& grid, const MaterialParams& prm, const BoundaryConfig& bc,
                            PlasticKind kind, BlockTag which,
                            DefectForm form = DefectForm::Curl) {
  bc.validate();
  const auto F = assemble_full(grid, prm, form);
  const auto B = constrain(grid, F, bc.gamma_faces, kind, bc.hard_faces());
  switch (which) {
    case BlockTag::Kuu: return B.Kuu;
    case BlockTag::Kup: return B.Kup;
    case BlockTag::KppElastic: return B.Kel;
    case BlockTag::KppCurl: return B.Kcurl;
    case BlockTag::KppSym: return B.Ksym;
    case BlockTag::Mass: return B.M;
    case BlockTag::LumpedMass: {
      SpMat D(B.w.size(), B.w.size());
      for (Eigen::Index i = 0; i < B.w.size(); ++i) D.insert(i, i) = B.w[i];
      D.makeCompressed();
      return D;
    }
  }
  return {};
}

/// Flattens a nodal vector field into 3n full dofs.
inline Vec flatten(const VectorField& u) {
  Vec x(3 * u.size());
  for (std::size_t v = 0; v < u.size(); ++v)
    for (int d = 0; d < 3; ++d) x[3 * v + d] = u[v][d];
  return x;
}

inline VectorField unflatten_vec(const Vec& x) {
  VectorField u(x.size() / 3);
  for (std::size_t v = 0; v < u.size(); ++v) u[v] = {x[3 * v], x[3 * v + 1], x[3 * v + 2]};
  return u;
}

inline Vec flatten(const TensorField& p) {
  Vec x(9 * p.size());
  for (std::size_t v = 0; v < p.size(); ++v)
    for (int k = 0; k < 9; ++k) x[9 * v + k] = p[v].a[k];
  return x;
}

inline TensorField unflatten_tensor(const Vec& x) {
  TensorField p(x.size() / 9);
  for (std::size_t v = 0; v < p.size(); ++v)
    for (int k = 0; k < 9; ++k) p[v].a[k] = x[9 * v + k];
  return p;
}

}  // namespace gradplast
