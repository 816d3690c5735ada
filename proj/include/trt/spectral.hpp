#pragma once

#include <complex>
#include <span>
#include <vector>

#include "trt/core_types.hpp"

namespace trt {

using cplx = std::complex<double>;

/// Signed alias of DFT index k on a length-n lattice, in [-n/2, n/2).
inline int signed_frequency(int k, int n) { return k < (n + 1) / 2 ? k : k - n; }
/// True for the unpaired bin k = n/2 of an even-length DFT.
inline bool is_nyquist(int k, int n) { return n % 2 == 0 && k == n / 2; }

/// Complex values on the 3D DFT lattice of a grid, x1 (y1) fastest.
///
/// Bin k along any axis corresponds to the angular frequency 2 pi k~ / (n h),
/// k~ = signed_frequency(k, n), h = voxel size.
struct SpectralField {
  VoxelGrid3 grid;
  std::vector<cplx> data;

  explicit SpectralField(const VoxelGrid3& g) : grid(g), data(g.voxel_count(), cplx{0.0, 0.0}) {}

  double frequency(int k) const { return 2.0 * kPi * signed_frequency(k, grid.n()) / (grid.n() * grid.voxel_size()); }
  Vec3 frequency(int k1, int k2, int k3) const { return {frequency(k1), frequency(k2), frequency(k3)}; }
  double nyquist() const { return kPi / grid.voxel_size(); }

  cplx& at(int k1, int k2, int k3) { return data[grid.index(k1, k2, k3)]; }
  cplx at(int k1, int k2, int k3) const { return data[grid.index(k1, k2, k3)]; }

  /// Bin holding frequency -y for bin k (lattice negation).
  static int mirror(int k, int n) { return k == 0 ? 0 : n - k; }
};

/// Unitary 3D DFT of a real field (forward kernel e^{-i<y,x>}).
SpectralField dft3(const ScalarField3& f);
SpectralField dft3(const VoxelGrid3& grid, std::span<const cplx> values);

/// Unitary inverse 3D DFT; the real part is returned, the largest |imaginary part|
/// is reported through max_imag when requested.
ScalarField3 idft3(const SpectralField& s, double* max_imag = nullptr);
std::vector<cplx> idft3_complex(const SpectralField& s);

/// Multiplies every bin by |Pi_eta y|^power, Pi_eta removing the component along the
/// coordinate axis eta. power must be 1, 2 or 3.
SpectralField ramp_multiplier(const SpectralField& s, int eta_axis, int power);

/// Largest |s(y) - conj(s(-y))| (or |s(y) + conj(s(-y))| when odd) over bins whose mirror
/// stays on the lattice, relative to the largest |s|.
double hermitian_defect(const SpectralField& s, bool odd = false);

/// Zero pads (centred) a field onto a larger grid with the same voxel size.
ScalarField3 pad_centered(const ScalarField3& f, int padded_n);
/// Inverse of pad_centered.
ScalarField3 crop_centered(const ScalarField3& f, int n);

// ---- 1D filtering along detector rows ---------------------------------------------

/// Hamming window w(n) = 0.54 - 0.46 cos(2 pi n / (N - 1)), n = 0..N-1.
double hamming_window(int n, int N);

/// The window laid out over a length-N DFT in centred frequency order: the value for the
/// signed frequency k~ is w(k~ + (N-1)/2), so it peaks at zero frequency and falls to
/// 0.08 at the band edges.
double hamming_at_frequency(int signed_k, int N);

/// Frequency response of the band-limited Ram-Lak filter on a length-N lattice with
/// sample spacing tau: DFT of the spatial kernel h[0] = 1/(4 tau^2),
/// h[odd m] = -1/(pi m tau)^2, scaled so that it approximates |sigma| (angular frequency).
std::vector<double> ramlak_response(int N, double tau);

/// Ram-Lak filtering of each row (length `cols`, spacing tau) of a row-major block.
/// Rows are zero padded to at least pad_factor * cols before the DFT.
std::vector<double> ramp_filter_sinogram(std::span<const double> rows, int cols, double tau, int pad_factor = 2);

/// Regularised derivative d/dp of each row: DFT, multiply bin k by i sigma_k w(k),
/// inverse DFT, real part. Rows are zero padded to pad_factor * cols first.
std::vector<double> hamming_derivative(std::span<const double> rows, int cols, double tau, int pad_factor = 2);

}  // namespace trt
