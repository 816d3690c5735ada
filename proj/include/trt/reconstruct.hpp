#pragma once

#include <array>
#include <string>
#include <vector>

#include "trt/backprojection.hpp"
#include "trt/core_types.hpp"
#include "trt/parallel.hpp"
#include "trt/projector.hpp"
#include "trt/spectral.hpp"

namespace trt {

/// How bins where some y_i vanishes are solved.
enum class SingularPolicy {
  /// Minimum-norm least squares of the rank-deficient per-bin system.
  MinNorm,
  /// Minimum-norm solution plus the null-space part of a Lagrange extrapolation from the
  /// solved bins on either side of each vanishing coordinate. Planes are filled before
  /// lines, lines before the origin, so every neighbour is already solved.
  NeighborNullspace,
};

struct ReconstructOptions {
  /// The back-projected lambda/mu volumes live on a zero-padded grid of about
  /// pad_factor * n voxels per edge before the 3D transform.
  int pad_factor = 2;
  SingularPolicy singular = SingularPolicy::NeighborNullspace;
  /// NeighborNullspace uses the bins at offsets +-1..+-interp_half_width.
  int interp_half_width = 3;
  /// Detector interpolation when back-projecting the lambda and mu data.
  BackprojectKernel kernel = BackprojectKernel::Cubic;
  /// Bins with |y_i| <= tau_rel * Nyquist count as singular.
  double tau_rel = 1e-9;
  Exec exec{};
};

/// Spectra lambda_i (or mu_i), i = axis e1, e2, e3, on a common padded lattice.
struct LambdaTriple {
  std::array<SpectralField, 3> l;
};
struct MuTriple {
  std::array<SpectralField, 3> m;
};

/// Off-diagonal spectra in the order (f12, f13, f23).
using OffDiagonalSpectra = std::array<SpectralField, 3>;
/// Diagonal spectra in the order (f11, f22, f33).
using DiagonalSpectra = std::array<SpectralField, 3>;

/// Edge of the padded lattice used for the lambda/mu volumes of an n-voxel grid.
int padded_size(int n, int pad_factor);

/// f_ii for each axis e_i by plane-by-plane Ram-Lak FBP of the axial data, on the
/// data's reconstruction grid. Order (f11, f22, f33).
std::array<ScalarField3, 3> recover_diagonals_fbp(const TrtDataSet& data, Exec exec = {});

/// FBP of the axial data of one coordinate axis.
ScalarField3 recover_diagonal_fbp(const TrtDataSet& data, int axis, Exec exec = {});

/// lambda_i(y) = sum_{a != i} y_a f^_ia, from J1 about e_i: regularised p-derivative, slice-wise
/// back-projection onto the padded grid, 3D DFT, times -(i/2) |Pi y|.
SpectralField assemble_lambda(const TrtDataSet& data, int axis, const ReconstructOptions& opts = {});

/// mu_i(y) = <f^ Pi y, Pi y>, from J2 about e_i: plane-by-plane FBP onto the padded grid, 3D DFT,
/// times |Pi y|^2.
SpectralField assemble_mu(const TrtDataSet& data, int axis, const ReconstructOptions& opts = {});

// ---- per-frequency solves ---------------------------------------------------------

/// System matrix of lambda = M (f12, f13, f23).
std::array<std::array<double, 3>, 3> lambda_matrix(const Vec3& y);
/// System matrix of nu = D (f11, f22, f33), nu_i = mu_i minus its off-diagonal terms.
std::array<std::array<double, 3>, 3> nu_matrix(const Vec3& y);

/// Closed form off the singular set; minimum-norm least squares when some |y_i| <= tau.
std::array<cplx, 3> solve_offdiagonals_bin(const Vec3& y, const std::array<cplx, 3>& lambda, double tau);

/// nu_i = mu_i - (off-diagonal contribution), for given off-diagonals (f12, f13, f23).
std::array<cplx, 3> nu_from_mu(const Vec3& y, const std::array<cplx, 3>& mu, const std::array<cplx, 3>& off);

/// Closed form in lambda and mu off the singular set; on it the off-diagonals are solved
/// first and the diagonal system is solved in the minimum-norm sense.
std::array<cplx, 3> recover_diagonals_bin(const Vec3& y, const std::array<cplx, 3>& lambda, const std::array<cplx, 3>& mu,
                                          double tau);

// ---- lattice solves ----------------------------------------------------------------

OffDiagonalSpectra solve_offdiagonals(const LambdaTriple& lambda, const ReconstructOptions& opts = {});
DiagonalSpectra recover_diagonals_alternative(const LambdaTriple& lambda, const MuTriple& mu,
                                              const ReconstructOptions& opts = {});

/// Inverse transform of a solved spectrum on the padded lattice, cropped to n voxels.
/// Reports the largest imaginary residue relative to the largest real value.
ScalarField3 spectrum_to_field(const SpectralField& s, int n, double* imag_ratio = nullptr);

struct ThreeAxisResult {
  SymTensorField3 f;
  double imag_ratio = 0.0;  ///< largest imaginary residue over the largest |value|
};

/// Diagonals by FBP, off-diagonals from the three lambda spectra.
ThreeAxisResult reconstruct_three_axis_report(const TrtDataSet& data, const ReconstructOptions& opts = {});
SymTensorField3 reconstruct_three_axis(const TrtDataSet& data, const ReconstructOptions& opts = {});

/// Diagonals from lambda and mu only, as fields on the reconstruction grid.
std::array<ScalarField3, 3> reconstruct_diagonals_alternative(const TrtDataSet& data, const ReconstructOptions& opts = {});

struct TwoAxisResult {
  VectorField3 u;
  SymTensorField3 f;
  std::vector<std::string> warnings;
};

/// Potential field f = du + du^T from data about e1 and e2 only. Other axes present in the
/// data are ignored with a warning.
TwoAxisResult reconstruct_two_axis_potential(const TrtDataSet& data, const ReconstructOptions& opts = {});

// ---- metrics -----------------------------------------------------------------------

/// Keeps DFT bins with |k~_i| < fraction * n / 2 on every axis.
ScalarField3 low_pass(const ScalarField3& f, double fraction = 0.8);

/// ||a - b|| / ||b|| (b is the reference). Returns ||a|| if b is zero.
double relative_l2(const ScalarField3& a, const ScalarField3& b);

/// relative_l2 of the low-passed fields.
double band_limited_relative_l2(const ScalarField3& a, const ScalarField3& b, double fraction = 0.8);

struct ConsistencyReport {
  std::array<double, 3> component{};  ///< f11, f22, f33
  double aggregate = 0.0;
};

/// Band-limited discrepancy ||a - b|| / max(||a||, ||b||) per diagonal component and over
/// all three together.
ConsistencyReport consistency_residual(const std::array<ScalarField3, 3>& a, const std::array<ScalarField3, 3>& b,
                                       double fraction = 0.8);

}  // namespace trt
