#include "trt/core_types.hpp"

#include <string>

namespace trt {

int coordinate_axis_of(const Vec3& v)
{
  for (int k = 0; k < 3; ++k) {
    if (v == unit_axis(k))
      return k;
  }
  return -1;
}

VoxelGrid3::VoxelGrid3(int n, double extent) : n_(n), extent_(extent)
{
  if (n < 2)
    throw std::invalid_argument("VoxelGrid3: n must be >= 2, got " + std::to_string(n));
  if (!(extent > 0.0) || !std::isfinite(extent))
    throw std::invalid_argument("VoxelGrid3: extent must be positive and finite");
}

Vec3 SymTensor3::apply(const Vec3& v) const
{
  return {c[0] * v[0] + c[1] * v[1] + c[2] * v[2],
          c[1] * v[0] + c[3] * v[1] + c[4] * v[2],
          c[2] * v[0] + c[4] * v[1] + c[5] * v[2]};
}

SymTensor3 project_transverse(const SymTensor3& t, const Vec3& xi)
{
  if (std::abs(norm(xi) - 1.0) > 1e-12)
    throw std::invalid_argument("project_transverse: direction is not unit length");
  // (Pi t Pi)_ij = t_ij - xi_i (t xi)_j - (t xi)_i xi_j + xi_i xi_j <xi, t xi>
  const Vec3 txi = t.apply(xi);
  const double q = dot(xi, txi);
  SymTensor3 r;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      r(i, j) = t(i, j) - xi[i] * txi[j] - txi[i] * xi[j] + xi[i] * xi[j] * q;
    }
  }
  return r;
}

SymTensor3 adjugate2(const SymTensor3& t, int eta_axis)
{
  if (eta_axis < 0 || eta_axis > 2)
    throw std::invalid_argument("adjugate2: axis must be 0, 1 or 2");
  const auto [a, b] = AxisFrame::plane_axes(eta_axis);
  SymTensor3 r;
  r(a, a) = t(b, b);
  r(b, b) = t(a, a);
  r(a, b) = -t(a, b);
  return r;
}

ScalarField3 VectorField3::component(int comp) const
{
  ScalarField3 out(grid);
  for (std::size_t v = 0; v < grid.voxel_count(); ++v)
    out.data[v] = data[3 * v + static_cast<std::size_t>(comp)];
  return out;
}

void VectorField3::set_component(int comp, const ScalarField3& f)
{
  if (!(f.grid == grid))
    throw std::invalid_argument("VectorField3::set_component: grid mismatch");
  for (std::size_t v = 0; v < grid.voxel_count(); ++v)
    data[3 * v + static_cast<std::size_t>(comp)] = f.data[v];
}

SymTensor3 SymTensorField3::tensor(std::size_t v) const
{
  SymTensor3 t;
  for (int c = 0; c < 6; ++c)
    t.c[static_cast<std::size_t>(c)] = data[6 * v + static_cast<std::size_t>(c)];
  return t;
}

void SymTensorField3::set_tensor(std::size_t v, const SymTensor3& t)
{
  for (int c = 0; c < 6; ++c)
    data[6 * v + static_cast<std::size_t>(c)] = t.c[static_cast<std::size_t>(c)];
}

ScalarField3 SymTensorField3::component(int comp) const
{
  if (comp < 0 || comp > 5)
    throw std::invalid_argument("SymTensorField3::component: index out of range");
  ScalarField3 out(grid);
  for (std::size_t v = 0; v < grid.voxel_count(); ++v)
    out.data[v] = data[6 * v + static_cast<std::size_t>(comp)];
  return out;
}

void SymTensorField3::set_component(int comp, const ScalarField3& f)
{
  if (comp < 0 || comp > 5)
    throw std::invalid_argument("SymTensorField3::set_component: index out of range");
  if (!(f.grid == grid))
    throw std::invalid_argument("SymTensorField3::set_component: grid mismatch");
  for (std::size_t v = 0; v < grid.voxel_count(); ++v)
    data[6 * v + static_cast<std::size_t>(comp)] = f.data[v];
}

Ray Ray::make(const Vec3& dir, const Vec3& base)
{
  if (std::abs(norm(dir) - 1.0) > 1e-12)
    throw std::invalid_argument("Ray: direction is not unit length");
  if (std::abs(dot(dir, base)) > 1e-12)
    throw std::invalid_argument("Ray: base point is not orthogonal to the direction");
  return Ray{dir, base};
}

AxisFrame::AxisFrame(int axis_, double theta_) : axis(axis_), theta(theta_)
{
  if (axis < 0 || axis > 2)
    throw std::invalid_argument("AxisFrame: axis must be 0, 1 or 2");
  eta = unit_axis(axis);
  const auto [a, b] = plane_axes(axis);
  xi = {0.0, 0.0, 0.0};
  xi[static_cast<std::size_t>(a)] = std::cos(theta);
  xi[static_cast<std::size_t>(b)] = std::sin(theta);
  zeta = cross(xi, eta);
}

std::array<int, 3> slab_voxel(int axis, int s_index, int u, int v)
{
  std::array<int, 3> idx{};
  const auto [a, b] = AxisFrame::plane_axes(axis);
  idx[static_cast<std::size_t>(axis)] = s_index;
  idx[static_cast<std::size_t>(a)] = u;
  idx[static_cast<std::size_t>(b)] = v;
  return idx;
}

TensorSlab slice_field(const SymTensorField3& f, int axis, int s_index)
{
  const int n = f.grid.n();
  if (axis < 0 || axis > 2)
    throw std::invalid_argument("slice_field: axis must be 0, 1 or 2");
  if (s_index < 0 || s_index >= n)
    throw std::invalid_argument("slice_field: plane index " + std::to_string(s_index) + " outside [0, " + std::to_string(n) + ")");
  TensorSlab slab{n, axis, s_index, std::vector<double>(static_cast<std::size_t>(n) * n * 6)};
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u) {
      const auto i = slab_voxel(axis, s_index, u, v);
      const auto src = f.voxel(f.grid.index(i[0], i[1], i[2]));
      double* dst = slab.data.data() + 6 * (static_cast<std::size_t>(u) + static_cast<std::size_t>(n) * v);
      for (int c = 0; c < 6; ++c)
        dst[c] = src[static_cast<std::size_t>(c)];
    }
  }
  return slab;
}

SymTensorField3 assemble_slices(const VoxelGrid3& grid, std::span<const TensorSlab> slabs)
{
  const int n = grid.n();
  if (slabs.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("assemble_slices: need exactly n slabs");
  SymTensorField3 f(grid);
  for (const auto& slab : slabs) {
    if (slab.n != n || slab.axis != slabs[0].axis)
      throw std::invalid_argument("assemble_slices: inconsistent slabs");
    for (int v = 0; v < n; ++v) {
      for (int u = 0; u < n; ++u) {
        const auto i = slab_voxel(slab.axis, slab.s_index, u, v);
        auto dst = f.voxel(grid.index(i[0], i[1], i[2]));
        for (int c = 0; c < 6; ++c)
          dst[static_cast<std::size_t>(c)] = slab.at(u, v, c);
      }
    }
  }
  return f;
}

}  // namespace trt
