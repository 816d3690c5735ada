#pragma once

#include <span>
#include <vector>

#include "trt/core_types.hpp"
#include "trt/parallel.hpp"
#include "trt/projector.hpp"

namespace trt {

/// Detector geometry of one plane's sinogram: angles uniform over [0, 2 pi), columns
/// centred on the rotation axis with spacing `pitch` along zeta.
struct SinogramGeometry {
  int n_angles;
  int cols;
  double pitch;

  double angle(int j) const { return 2.0 * kPi * j / n_angles; }
  double col_coord(int c) const { return (c - 0.5 * (cols - 1)) * pitch; }
};

enum class BackprojectKernel {
  /// Mean over angles of the sinogram linearly interpolated at p = <x, zeta>.
  Interpolated,
  /// As Interpolated with Keys cubic convolution (a = -1/2) in place of linear interpolation.
  Cubic,
  /// Transpose of the Siddon ray sums, scaled by pitch / (h^2 n_angles) so that it
  /// approximates the same continuous operator.
  RayTranspose,
};

/// Back-projects one plane's sinogram ([angle][col]) onto the n x n slab of `grid`
/// orthogonal to `axis` at plane `s_index`. Output is indexed u + n v (plane_axes order).
std::vector<double> backproject_plane(std::span<const double> sinogram, const SinogramGeometry& geom,
                                      const VoxelGrid3& grid, int axis, int s_index,
                                      BackprojectKernel kernel = BackprojectKernel::Interpolated);

/// Siddon projection of an n x n slab image (u + n v) lying on plane s_index: [angle][col].
std::vector<double> project_plane(std::span<const double> image, const SinogramGeometry& geom,
                                  const VoxelGrid3& grid, int axis, int s_index);

/// Slice-by-slice back-projection of a [angle][row][col] block about `axis`.
/// Detector rows are matched to grid planes by their s coordinate; planes without a
/// detector row stay zero. The grid voxel size must equal the detector pitch.
ScalarField3 backproject_axis(std::span<const double> block, int rows, const SinogramGeometry& geom, int axis,
                              const VoxelGrid3& grid, Exec exec = {},
                              BackprojectKernel kernel = BackprojectKernel::Interpolated);

/// Plane-by-plane filtered back-projection (Ram-Lak rows, interpolating back-projection,
/// factor 1/2) of a [angle][row][col] block about `axis`.
ScalarField3 fbp_axis(std::span<const double> block, int rows, const SinogramGeometry& geom, int axis,
                      const VoxelGrid3& grid, Exec exec = {}, BackprojectKernel kernel = BackprojectKernel::Interpolated);

/// Exact transpose of the unbinned forward TRT of simulate_acquisition with respect to the
/// plain Euclidean inner products of the stored data and of the stored 6-component field.
SymTensorField3 trt_adjoint(const TrtDataSet& data, const VoxelGrid3& grid, Exec exec = {});

namespace reference {
/// Serial plane loop over backproject_plane.
ScalarField3 backproject_axis(std::span<const double> block, int rows, const SinogramGeometry& geom, int axis,
                              const VoxelGrid3& grid, BackprojectKernel kernel = BackprojectKernel::Interpolated);
/// Serial ray loop over trace_ray.
SymTensorField3 trt_adjoint(const TrtDataSet& data, const VoxelGrid3& grid);
}  // namespace reference

}  // namespace trt
