#pragma once

// Structured box grid of identical axis-aligned hexahedra with trilinear
// nodal shape functions and 2x2x2 Gauss quadrature.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gradplast/errors.hpp"
#include "gradplast/tensor.hpp"

namespace gradplast {

enum class Face : int { XMin = 0, XMax = 1, YMin = 2, YMax = 3, ZMin = 4, ZMax = 5 };

inline constexpr std::array<std::string_view, 6> kFaceNames = {"xmin", "xmax", "ymin",
                                                                 "ymax", "zmin", "zmax"};

inline int face_axis(Face f) { return static_cast<int>(f) / 2; }

/// Small bitset over the six box faces.
class FaceSet {
 public:
  constexpr FaceSet() = default;
  constexpr explicit FaceSet(std::uint8_t bits) : bits_(bits & 0x3F) {}

  static constexpr FaceSet all() { return FaceSet(0x3F); }
  static constexpr FaceSet none() { return FaceSet(0); }

  constexpr bool contains(Face f) const { return (bits_ >> static_cast<int>(f)) & 1u; }
  constexpr FaceSet& insert(Face f) {
    bits_ |= static_cast<std::uint8_t>(1u << static_cast<int>(f));
    return *this;
  }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }
  constexpr FaceSet operator&(FaceSet o) const { return FaceSet(bits_ & o.bits_); }
  constexpr FaceSet operator|(FaceSet o) const { return FaceSet(bits_ | o.bits_); }
  constexpr bool is_subset_of(FaceSet o) const { return (bits_ & ~o.bits_) == 0; }

  /// Axes (0,1,2) that have at least one face in the set.
  int axis_count() const {
    int c = 0;
    for (int d = 0; d < 3; ++d)
      if (((bits_ >> (2 * d)) & 3u) != 0) ++c;
    return c;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (int f = 0; f < 6; ++f)
      if (contains(static_cast<Face>(f))) out.emplace_back(kFaceNames[f]);
    return out;
  }

  static FaceSet from_name(std::string_view name) {
    if (name == "all") return all();
    for (int f = 0; f < 6; ++f)
      if (kFaceNames[f] == name) return FaceSet().insert(static_cast<Face>(f));
    throw ValidationError("unknown face name '" + std::string(name) + "'");
  }

  friend constexpr bool operator==(FaceSet, FaceSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

using VectorField = std::vector<Vec3>;
using TensorField = std::vector<Mat3>;
using ScalarField = std::vector<double>;

inline constexpr int kGaussPerCell = 8;
inline constexpr int kNodesPerCell = 8;

/// Shape data of the reference cell scaled to the physical cell size. The grid
/// is uniform, so one instance serves every cell.
struct CellShape {
  std::array<std::array<double, kNodesPerCell>, kGaussPerCell> N{};
  std::array<std::array<Vec3, kNodesPerCell>, kGaussPerCell> dN{};
  std::array<double, kGaussPerCell> weight{};
  /// Local coordinates (in [0,1]^3) of the Gauss points.
  std::array<Vec3, kGaussPerCell> xi{};
};

struct Grid {
  std::array<int, 3> n{1, 1, 1};
  Vec3 h{1.0, 1.0, 1.0};
  Vec3 origin{0.0, 0.0, 0.0};

  static Grid cube(int cells, double size = 1.0, Vec3 origin = {0.0, 0.0, 0.0}) {
    Grid g;
    g.n = {cells, cells, cells};
    g.h = {size / cells, size / cells, size / cells};
    g.origin = origin;
    g.validate();
    return g;
  }

  void validate() const {
    for (int d = 0; d < 3; ++d) {
      if (n[d] < 1) throw ValidationError("grid: cells per axis must be >= 1");
      if (!(h[d] > 0.0)) throw ValidationError("grid: cell size must be > 0");
    }
  }

  int nodes_along(int d) const { return n[d] + 1; }
  int node_count() const { return (n[0] + 1) * (n[1] + 1) * (n[2] + 1); }
  int cell_count() const { return n[0] * n[1] * n[2]; }
  double cell_volume() const { return h[0] * h[1] * h[2]; }
  double volume() const { return cell_volume() * cell_count(); }
  Vec3 extent() const { return {n[0] * h[0], n[1] * h[1], n[2] * h[2]}; }

  int node_index(int i, int j, int k) const { return i + (n[0] + 1) * (j + (n[1] + 1) * k); }

  std::array<int, 3> node_ijk(int node) const {
    const int nx = n[0] + 1, ny = n[1] + 1;
    return {node % nx, (node / nx) % ny, node / (nx * ny)};
  }

  Vec3 node_coords(int node) const {
    const auto ijk = node_ijk(node);
    return {origin[0] + ijk[0] * h[0], origin[1] + ijk[1] * h[1], origin[2] + ijk[2] * h[2]};
  }

  std::array<int, 3> cell_ijk(int cell) const {
    return {cell % n[0], (cell / n[0]) % n[1], cell / (n[0] * n[1])};
  }

  /// Local node a = ix + 2 iy + 4 iz.
  std::array<int, kNodesPerCell> cell_nodes(int cell) const {
    if (cell < 0 || cell >= cell_count()) throw IndexOutOfRange("cell index out of range");
    const auto c = cell_ijk(cell);
    std::array<int, kNodesPerCell> out{};
    for (int a = 0; a < kNodesPerCell; ++a)
      out[a] = node_index(c[0] + (a & 1), c[1] + ((a >> 1) & 1), c[2] + ((a >> 2) & 1));
    return out;
  }

  /// Physical position of local coordinates xi in [0,1]^3 of a cell.
  Vec3 cell_point(int cell, const Vec3& xi) const {
    const auto c = cell_ijk(cell);
    return {origin[0] + (c[0] + xi[0]) * h[0], origin[1] + (c[1] + xi[1]) * h[1], origin[2] + (c[2] + xi[2]) * h[2]};
  }

  /// Boundary faces on which the node lies.
  FaceSet node_faces(int node) const {
    const auto ijk = node_ijk(node);
    FaceSet s;
    for (int d = 0; d < 3; ++d) {
      if (ijk[d] == 0) s.insert(static_cast<Face>(2 * d));
      if (ijk[d] == n[d]) s.insert(static_cast<Face>(2 * d + 1));
    }
    return s;
  }

  /// Lumped (row-sum) mass weight of a node: integral of its shape function.
  double lumped_weight(int node) const {
    const auto ijk = node_ijk(node);
    double w = cell_volume();
    for (int d = 0; d < 3; ++d) {
      const int cnt = (ijk[d] > 0 ? 1 : 0) + (ijk[d] < n[d] ? 1 : 0);
      w *= 0.5 * cnt;
    }
    return w;
  }

  friend bool operator==(const Grid&, const Grid&) = default;
};

inline CellShape reference_shape(const Grid& grid) {
  CellShape s;
  const double g = 0.5 / std::sqrt(3.0);
  const std::array<double, 2> pts{0.5 - g, 0.5 + g};
  const double w = grid.cell_volume() / 8.0;
  for (int q = 0; q < kGaussPerCell; ++q) {
    const Vec3 xi{pts[q & 1], pts[(q >> 1) & 1], pts[(q >> 2) & 1]};
    s.xi[q] = xi;
    s.weight[q] = w;
    for (int a = 0; a < kNodesPerCell; ++a) {
      std::array<double, 3> f{}, df{};
      for (int d = 0; d < 3; ++d) {
        const bool hi = (a >> d) & 1;
        f[d] = hi ? xi[d] : 1.0 - xi[d];
        df[d] = (hi ? 1.0 : -1.0) / grid.h[d];
      }
      s.N[q][a] = f[0] * f[1] * f[2];
      s.dN[q][a] = {df[0] * f[1] * f[2], f[0] * df[1] * f[2], f[0] * f[1] * df[2]};
    }
  }
  return s;
}

/// Shape-function gradients at the Gauss points of one cell.
inline CellShape shape_gradients(const Grid& grid, int cell) {
  if (cell < 0 || cell >= grid.cell_count()) throw IndexOutOfRange("cell index out of range");
  return reference_shape(grid);
}

/// Weights of the trilinear interpolant along the two axes transverse to d.
inline double transverse_weight(const Vec3& xi, int d, int a) {
  double w = 1.0;
  for (int e = 0; e < 3; ++e) {
    if (e == d) continue;
    w *= ((a >> e) & 1) ? xi[e] : 1.0 - xi[e];
  }
  return w;
}

/// Gradient of the trilinear interpolant of nodal values at local point xi,
/// computed from nodal differences so that constant fields give exactly zero.
/// get(a) returns the value at local node a; T must support +, -, scalar *.
template <typename T, typename Get>
std::array<T, 3> interpolant_gradient(const Grid& grid, const Vec3& xi, Get&& get) {
  std::array<T, 3> out{};
  for (int d = 0; d < 3; ++d) {
    T acc{};
    for (int a = 0; a < kNodesPerCell; ++a) {
      if ((a >> d) & 1) continue;
      const int b = a | (1 << d);
      acc = acc + transverse_weight(xi, d, a) * (get(b) - get(a));
    }
    out[d] = (1.0 / grid.h[d]) * acc;
  }
  return out;
}

/// Gradient of a nodal tensor field at the Gauss points of a cell: g[i](j,k).
inline Grad3 tensor_gradient_at(const Grid& grid, const TensorField& P,
                                const std::array<int, kNodesPerCell>& nodes, const Vec3& xi) {
  const auto d = interpolant_gradient<Mat3>(grid, xi, [&](int a) { return P[nodes[a]]; });
  Grad3 g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) g[i](j, k) = d[k](i, j);
  return g;
}

/// Gradient of a nodal vector field at a local point: (grad u)_ij = d u_i / d x_j.
inline Mat3 vector_gradient_at(const Grid& grid, const VectorField& u,
                               const std::array<int, kNodesPerCell>& nodes, const Vec3& xi) {
  const auto d = interpolant_gradient<Vec3>(grid, xi, [&](int a) { return u[nodes[a]]; });
  Mat3 g;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) g(i, k) = d[k][i];
  return g;
}

template <typename T>
T interpolate_at(const CellShape& shape, int q, const std::vector<T>& field,
                 const std::array<int, kNodesPerCell>& nodes) {
  T acc{};
  for (int a = 0; a < kNodesPerCell; ++a) acc = acc + shape.N[q][a] * field[nodes[a]];
  return acc;
}

/// Curl of the trilinear interpolant of P at every Gauss point, ordered
/// cell-major (index cell * 8 + q).
inline std::vector<Mat3> discrete_curl(const Grid& grid, const TensorField& P) {
  if (static_cast<int>(P.size()) != grid.node_count())
    throw ValidationError("discrete_curl: field size does not match grid");
  const CellShape shape = reference_shape(grid);
  std::vector<Mat3> out(static_cast<std::size_t>(grid.cell_count()) * kGaussPerCell);
  for (int c = 0; c < grid.cell_count(); ++c) {
    const auto nodes = grid.cell_nodes(c);
    for (int q = 0; q < kGaussPerCell; ++q)
      out[c * kGaussPerCell + q] = L_apply(tensor_gradient_at(grid, P, nodes, shape.xi[q]));
  }
  return out;
}

/// Nodal interpolation of a function of position.
template <typename T, typename F>
std::vector<T> interpolate_nodal(const Grid& grid, F&& f) {
  std::vector<T> out(grid.node_count());
  for (int v = 0; v < grid.node_count(); ++v) out[v] = f(grid.node_coords(v));
  return out;
}

}  // namespace gradplast
