#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "trt/core_types.hpp"
#include "trt/spectral.hpp"

namespace trt {

/// alpha * exp(-beta |x - a|^2); the test phantoms use beta = 50.
struct GaussianBump {
  double alpha;
  Vec3 a;
  double beta = 50.0;

  double operator()(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
};

/// Gaussians per tensor component (storage order f11, f12, f13, f22, f23, f33) of the
/// smooth test field. The two opposite f22 bumps at (0.5, 0.5, 0.5) are kept as listed
/// and cancel.
const std::array<std::vector<GaussianBump>, 6>& smooth_phantom_table();

/// Component `comp` of the smooth field at an arbitrary point.
double smooth_component(int comp, const Vec3& x);

SymTensorField3 smooth_phantom(const VoxelGrid3& grid);

/// Axis-aligned box I1 x I2 x I3 (closed intervals).
struct BoxSpec {
  std::array<std::array<double, 2>, 3> I;

  bool contains(const Vec3& x) const;
  double volume() const;
};

/// One box per tensor component, storage order. The f11 box's third interval is
/// [-0.8, 0.8].
const std::array<BoxSpec, 6>& sharp_phantom_table();

/// Indicator of each component's box, evaluated at voxel centres.
SymTensorField3 sharp_phantom(const VoxelGrid3& grid);

/// Displacement u with its Jacobian jacobian(x)[i][j] = du_i/dx_j.
struct Displacement {
  std::function<Vec3(const Vec3&)> value;
  std::function<std::array<Vec3, 3>(const Vec3&)> jacobian;
};

/// u_i = bumps[i](x).
Displacement gaussian_displacement(const std::array<GaussianBump, 3>& bumps);

/// The displacement used by the CLI "potential" phantom and the two-axis tests.
Displacement default_displacement();

VectorField3 sample_displacement(const VoxelGrid3& grid, const Displacement& u);

/// f_ij = du_i/dx_j + du_j/dx_i with exact partials.
SymTensorField3 potential_field(const VoxelGrid3& grid, const Displacement& u);

/// Same for a sampled displacement by fourth_order_difference.
SymTensorField3 potential_field(const VectorField3& u);

/// Five-point fourth-order central differences, falling back to central_difference on the
/// two voxels nearest each face.
ScalarField3 fourth_order_difference(const ScalarField3& f, int axis);

/// Derivative along `axis` (0, 1, 2): central differences inside, second-order one-sided
/// differences on the boundary voxels.
ScalarField3 central_difference(const ScalarField3& f, int axis);

/// Cumulative trapezoid integral along `axis`, starting from value 0 on the low face
/// (half a voxel before the first centre, integrand there extrapolated linearly).
ScalarField3 cumulative_integral(const ScalarField3& f, int axis);

/// Generator of the e2 displacement component for the one-axis null field, with its x2 partial.
struct U2Generator {
  std::function<double(const Vec3&)> u2;
  std::function<double(const Vec3&)> du2_dx2;
};

/// u2 = d/dx3 of amplitude * exp(-|x - centre|^2 / (2 width^2)); u3 then decays on both faces.
U2Generator gaussian_u2_generator(double amplitude = 1.0, Vec3 centre = {0.0, 0.0, 0.0}, double width = 0.2);

struct NullFieldResult {
  SymTensorField3 f;
  VectorField3 u;
  std::vector<std::string> warnings;
};

/// Potential field of u = (0, u2, u3) with u3 the integral of -du2/dx2 along x3 from the low
/// face (Gauss-Legendre quadrature of the generator between voxel centres).
/// Data about e1 vanish in the continuum. A warning is recorded if u2 or u3 does not decay
/// at the grid boundary.
NullFieldResult one_axis_null_field(const VoxelGrid3& grid, const U2Generator& gen);

/// Hermitian seed spectrum amplitude * (G(y - y0) + G(y + y0)) * exp(-i y.c) with
/// G(y) = exp(-|y|^2 / (2 width^2)) and c the box centre relative to voxel 0, so the field
/// sits in the middle of the grid. y0 and width in angular frequency units. Bins on the
/// Nyquist planes of an even lattice are zero.
SpectralField gaussian_seed(const VoxelGrid3& grid, const Vec3& y0, double width, double amplitude = 1.0);

/// Seed used by the CLI "null2" phantom.
SpectralField default_seed(const VoxelGrid3& grid);

/// Field with f33^ = g^, f23^ = -y3/(2 y2) g^, f13^ = -y3/(2 y1) g^, f12^ = y3^2/(2 y1 y2) g^
/// and zero diagonals f11, f22. Its data about e1 and e2 vanish in the continuum.
/// Throws std::invalid_argument if |g^| on the lattice planes y1 = 0 or y2 = 0 exceeds
/// 1e-3 of its peak, or if the inverse transform is not real to 1e-10.
SymTensorField3 two_axis_null_field(const SpectralField& g_hat);

}  // namespace trt
