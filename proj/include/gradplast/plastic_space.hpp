#pragma once

// Nodal coordinate spaces for the plastic field. Every node carries the
// coordinates of its value in an orthonormal (Frobenius) basis of the
// admissible subspace, so the Euclidean norm of a node's coordinate block is
// the Frobenius norm of the tensor it represents.

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "gradplast/grid.hpp"
#include "gradplast/tensor.hpp"

namespace gradplast {

enum class PlasticKind {
  Distortion,  ///< trace-free tensors, sl(3)
  Strain,      ///< symmetric trace-free tensors, Sym(3) ∩ sl(3)
  Full,        ///< all of R^{3x3}
};

namespace detail {

inline std::vector<Mat3> symmetric_traceless_basis() {
  const double r2 = 1.0 / std::sqrt(2.0);
  const double r6 = 1.0 / std::sqrt(6.0);
  std::vector<Mat3> b;
  b.push_back(r2 * (Mat3::unit(0, 1) + Mat3::unit(1, 0)));
  b.push_back(r2 * (Mat3::unit(0, 2) + Mat3::unit(2, 0)));
  b.push_back(r2 * (Mat3::unit(1, 2) + Mat3::unit(2, 1)));
  b.push_back(r2 * (Mat3::unit(0, 0) - Mat3::unit(1, 1)));
  b.push_back(r6 * (Mat3::unit(0, 0) + Mat3::unit(1, 1) - 2.0 * Mat3::unit(2, 2)));
  return b;
}

inline std::vector<Mat3> skew_basis() {
  const double r2 = 1.0 / std::sqrt(2.0);
  return {r2 * (Mat3::unit(0, 1) - Mat3::unit(1, 0)), r2 * (Mat3::unit(0, 2) - Mat3::unit(2, 0)),
          r2 * (Mat3::unit(1, 2) - Mat3::unit(2, 1))};
}

inline std::vector<Mat3> unconstrained_basis(PlasticKind kind) {
  auto b = symmetric_traceless_basis();
  if (kind == PlasticKind::Strain) return b;
  for (const auto& s : skew_basis()) b.push_back(s);
  if (kind == PlasticKind::Full) b.push_back((1.0 / std::sqrt(3.0)) * Mat3::identity());
  return b;
}

/// Basis of {p : p x e_k = 0} within the kind's subspace, i.e. tensors whose
/// rows are parallel to e_k (only column k nonzero).
inline std::vector<Mat3> single_face_basis(PlasticKind kind, int axis) {
  std::vector<Mat3> b;
  if (kind == PlasticKind::Strain) return b;  // a e_k^T symmetric and trace-free forces 0
  for (int i = 0; i < 3; ++i) {
    if (i == axis && kind == PlasticKind::Distortion) continue;
    b.push_back(Mat3::unit(i, axis));
  }
  return b;
}

}  // namespace detail

/// Sets p_ij = 0 for j != k at every node lying on a face with normal e_k in
/// `faces`. Idempotent.
inline TensorField apply_micro_hard_mask(const Grid& grid, FaceSet faces, TensorField P) {
  for (int v = 0; v < grid.node_count(); ++v) {
    const FaceSet on = grid.node_faces(v) & faces;
    for (int f = 0; f < 6; ++f) {
      if (!on.contains(static_cast<Face>(f))) continue;
      const int k = f / 2;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (j != k) P[v](i, j) = 0.0;
    }
  }
  return P;
}

/// Per-node admissible coordinate spaces for a plastic field on a grid with
/// micro-hard faces.
class PlasticSpace {
 public:
  PlasticSpace() = default;
  PlasticSpace(const Grid& grid, PlasticKind kind, FaceSet hard) : grid_(grid), kind_(kind), hard_(hard) {
    tables_[0] = detail::unconstrained_basis(kind);
    for (int d = 0; d < 3; ++d) tables_[1 + d] = detail::single_face_basis(kind, d);
    // tables_[4] stays empty: two or more distinct hard normals pin the node.
    const int nn = grid.node_count();
    type_.resize(nn);
    offset_.resize(nn + 1);
    int off = 0;
    for (int v = 0; v < nn; ++v) {
      const FaceSet on = grid.node_faces(v) & hard;
      int t = 0;
      if (on.axis_count() == 1) {
        for (int d = 0; d < 3; ++d)
          if (on.contains(static_cast<Face>(2 * d)) || on.contains(static_cast<Face>(2 * d + 1)))
            t = 1 + d;
      } else if (on.axis_count() > 1) {
        t = 4;
      }
      type_[v] = t;
      offset_[v] = off;
      off += static_cast<int>(tables_[t].size());
    }
    offset_[nn] = off;
  }

  const Grid& grid() const { return grid_; }
  PlasticKind kind() const { return kind_; }
  FaceSet hard_faces() const { return hard_; }
  int size() const { return offset_.back(); }
  int node_count() const { return static_cast<int>(type_.size()); }
  int offset(int node) const { return offset_[node]; }
  int dim(int node) const { return offset_[node + 1] - offset_[node]; }
  const std::vector<Mat3>& basis(int node) const { return tables_[type_[node]]; }
  int max_dim() const { return static_cast<int>(tables_[0].size()); }

  /// Coordinates of the orthogonal projection of P onto the admissible space.
  Eigen::VectorXd to_coords(const TensorField& P) const {
    Eigen::VectorXd c(size());
    for (int v = 0; v < node_count(); ++v) {
      const auto& b = basis(v);
      for (std::size_t m = 0; m < b.size(); ++m) c[offset_[v] + m] = frob(b[m], P[v]);
    }
    return c;
  }

  TensorField from_coords(const Eigen::VectorXd& c) const {
    TensorField P(node_count());
    for (int v = 0; v < node_count(); ++v) P[v] = node_value(c, v);
    return P;
  }

  Mat3 node_value(const Eigen::VectorXd& c, int v) const {
    Mat3 m;
    const auto& b = basis(v);
    for (std::size_t k = 0; k < b.size(); ++k) m += c[offset_[v] + k] * b[k];
    return m;
  }

  /// Projection of an arbitrary tensor onto node v's admissible subspace.
  Mat3 project(int v, const Mat3& x) const {
    Mat3 m;
    for (const auto& b : basis(v)) m += frob(b, x) * b;
    return m;
  }

 private:
  Grid grid_;
  PlasticKind kind_ = PlasticKind::Distortion;
  FaceSet hard_;
  std::array<std::vector<Mat3>, 5> tables_;
  std::vector<int> type_;
  std::vector<int> offset_{0};
};

}  // namespace gradplast
