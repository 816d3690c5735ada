#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace trt {

using Vec3 = std::array<double, 3>;

inline constexpr double kPi = 3.14159265358979323846;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline Vec3 cross(const Vec3& a, const Vec3& b)
{
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

/// Unit coordinate vector e_{axis+1}; axis is 0, 1 or 2.
inline Vec3 unit_axis(int axis)
{
  Vec3 e{0.0, 0.0, 0.0};
  e.at(static_cast<std::size_t>(axis)) = 1.0;
  return e;
}

/// Returns the coordinate index (0, 1, 2) if v is exactly +e_k, else -1.
int coordinate_axis_of(const Vec3& v);

/// Cubic voxel lattice over [-extent, extent]^3 with n voxels per edge.
class VoxelGrid3 {
public:
  VoxelGrid3(int n, double extent);

  int n() const { return n_; }
  double extent() const { return extent_; }
  double voxel_size() const { return 2.0 * extent_ / n_; }
  std::size_t voxel_count() const { return static_cast<std::size_t>(n_) * n_ * n_; }

  /// Physical coordinate of the centre of voxel i along any axis.
  double center(int i) const { return -extent_ + (i + 0.5) * voxel_size(); }

  /// Linear voxel index, x1 fastest, then x2, then x3.
  std::size_t index(int i1, int i2, int i3) const
  {
    return static_cast<std::size_t>(i1) + static_cast<std::size_t>(n_) * (static_cast<std::size_t>(i2) + static_cast<std::size_t>(n_) * i3);
  }

  bool operator==(const VoxelGrid3&) const = default;

private:
  int n_;
  double extent_;
};

/// Symmetric 3x3 tensor stored as (f11, f12, f13, f22, f23, f33).
struct SymTensor3 {
  std::array<double, 6> c{};

  static constexpr int kComponents = 6;

  /// Storage slot of entry (i, j), zero based, symmetric.
  static constexpr int slot(int i, int j)
  {
    if (i > j) {
      const int t = i;
      i = j;
      j = t;
    }
    constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    return table[i][j];
  }

  double operator()(int i, int j) const { return c[static_cast<std::size_t>(slot(i, j))]; }
  double& operator()(int i, int j) { return c[static_cast<std::size_t>(slot(i, j))]; }

  Vec3 apply(const Vec3& v) const;
  /// <a, T b>
  double bilinear(const Vec3& a, const Vec3& b) const { return dot(a, apply(b)); }

  static SymTensor3 identity() { return SymTensor3{{1, 0, 0, 1, 0, 1}}; }
  bool operator==(const SymTensor3&) const = default;
};

/// Component names in storage order.
inline constexpr std::array<const char*, 6> kComponentNames = {"f11", "f12", "f13", "f22", "f23", "f33"};

/// P_xi t = Pi t Pi with Pi = I - xi xi^T. Throws if |xi| deviates from 1 by more than 1e-12.
SymTensor3 project_transverse(const SymTensor3& t, const Vec3& xi);

/// 2D adjugate of the block of t orthogonal to the coordinate axis eta (0, 1, 2).
/// The two diagonal entries swap, the off-diagonal is negated, entries touching eta are zero.
SymTensor3 adjugate2(const SymTensor3& t, int eta_axis);

/// Real scalar field on a VoxelGrid3, x1 fastest.
struct ScalarField3 {
  VoxelGrid3 grid;
  std::vector<double> data;

  explicit ScalarField3(const VoxelGrid3& g) : grid(g), data(g.voxel_count(), 0.0) {}

  double& at(int i1, int i2, int i3) { return data[grid.index(i1, i2, i3)]; }
  double at(int i1, int i2, int i3) const { return data[grid.index(i1, i2, i3)]; }
};

/// Vector field with three components per voxel, component fastest.
struct VectorField3 {
  VoxelGrid3 grid;
  std::vector<double> data;

  explicit VectorField3(const VoxelGrid3& g) : grid(g), data(3 * g.voxel_count(), 0.0) {}

  double& at(int i1, int i2, int i3, int comp) { return data[3 * grid.index(i1, i2, i3) + static_cast<std::size_t>(comp)]; }
  double at(int i1, int i2, int i3, int comp) const { return data[3 * grid.index(i1, i2, i3) + static_cast<std::size_t>(comp)]; }

  ScalarField3 component(int comp) const;
  void set_component(int comp, const ScalarField3& f);
};

/// Symmetric tensor field: n^3 x 6 reals, tensor component fastest, then x1, x2, x3.
struct SymTensorField3 {
  VoxelGrid3 grid;
  std::vector<double> data;

  explicit SymTensorField3(const VoxelGrid3& g) : grid(g), data(6 * g.voxel_count(), 0.0) {}

  std::span<double, 6> voxel(std::size_t v) { return std::span<double, 6>(data.data() + 6 * v, 6); }
  std::span<const double, 6> voxel(std::size_t v) const { return std::span<const double, 6>(data.data() + 6 * v, 6); }

  SymTensor3 tensor(std::size_t v) const;
  void set_tensor(std::size_t v, const SymTensor3& t);

  ScalarField3 component(int comp) const;
  void set_component(int comp, const ScalarField3& f);
};

/// Oriented line {base + t dir}, |dir| = 1 and <dir, base> = 0.
struct Ray {
  Vec3 dir;
  Vec3 base;

  /// Validates the invariants (1e-12) and throws std::invalid_argument otherwise.
  static Ray make(const Vec3& dir, const Vec3& base);
};

/// Acquisition frame for rotation about a coordinate axis.
///
/// For axis e_k the ray direction sweeps xi(theta) = cos(theta) e_{k+1} + sin(theta) e_{k+2}
/// (indices cyclic) and zeta = xi x eta, so (eta, zeta, xi) is right handed. Detector rows
/// run along eta (coordinate s) and columns along zeta (coordinate p).
struct AxisFrame {
  int axis;
  double theta;
  Vec3 eta;
  Vec3 xi;
  Vec3 zeta;

  AxisFrame(int axis, double theta);

  /// The two in-plane coordinate axes, in the order used for slabs: (k+1, k+2) mod 3.
  static std::array<int, 2> plane_axes(int axis) { return {(axis + 1) % 3, (axis + 2) % 3}; }

  Ray ray(double s, double p) const { return Ray{xi, s * eta + p * zeta}; }
};

/// n x n slab of a tensor field on the plane <x, eta> = s, with in-plane coordinates
/// (u, v) following AxisFrame::plane_axes, u fastest, 6 components per pixel.
struct TensorSlab {
  int n;
  int axis;
  int s_index;
  std::vector<double> data;

  double at(int u, int v, int comp) const { return data[6 * (static_cast<std::size_t>(u) + static_cast<std::size_t>(n) * v) + static_cast<std::size_t>(comp)]; }
};

/// Voxel index (i1, i2, i3) of slab pixel (u, v) on plane s_index for the given axis.
std::array<int, 3> slab_voxel(int axis, int s_index, int u, int v);

TensorSlab slice_field(const SymTensorField3& f, int axis, int s_index);

/// Inverse of slicing: re-stacks all n slabs of one axis into a field.
SymTensorField3 assemble_slices(const VoxelGrid3& grid, std::span<const TensorSlab> slabs);

}  // namespace trt
