#include "trt/spectral.hpp"

#include "trt/parallel.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>
#include <omp.h>

namespace trt {

namespace {

// FFTW planning is not thread safe; execution of an existing plan is.
std::mutex& planner_mutex()
{
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  fftw_complex* ptr = nullptr;
  explicit FftwBuffer(std::size_t n) : ptr(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)))
  {
    if (!ptr)
      throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  cplx* data() { return reinterpret_cast<cplx*>(ptr); }
};

struct FftwPlan {
  fftw_plan plan = nullptr;
  FftwPlan() = default;
  explicit FftwPlan(fftw_plan p) : plan(p)
  {
    if (!plan)
      throw std::runtime_error("FFTW planning failed");
  }
  ~FftwPlan()
  {
    if (plan) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
};

void fft3_inplace(std::vector<cplx>& values, int n, int sign)
{
  FftwBuffer buf(values.size());
  FftwPlan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.plan = fftw_plan_dft_3d(n, n, n, buf.ptr, buf.ptr, sign, FFTW_ESTIMATE);
  }
  if (!plan.plan)
    throw std::runtime_error("FFTW planning failed");
  std::copy(values.begin(), values.end(), buf.data());
  fftw_execute(plan.plan);
  const double scale = 1.0 / std::sqrt(static_cast<double>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = buf.data()[i] * scale;
}

}  // namespace

SpectralField dft3(const ScalarField3& f)
{
  SpectralField s(f.grid);
  for (std::size_t i = 0; i < f.data.size(); ++i)
    s.data[i] = cplx{f.data[i], 0.0};
  fft3_inplace(s.data, f.grid.n(), FFTW_FORWARD);
  return s;
}

SpectralField dft3(const VoxelGrid3& grid, std::span<const cplx> values)
{
  if (values.size() != grid.voxel_count())
    throw std::invalid_argument("dft3: value count does not match the grid");
  SpectralField s(grid);
  std::copy(values.begin(), values.end(), s.data.begin());
  fft3_inplace(s.data, grid.n(), FFTW_FORWARD);
  return s;
}

std::vector<cplx> idft3_complex(const SpectralField& s)
{
  std::vector<cplx> v = s.data;
  fft3_inplace(v, s.grid.n(), FFTW_BACKWARD);
  return v;
}

ScalarField3 idft3(const SpectralField& s, double* max_imag)
{
  const std::vector<cplx> v = idft3_complex(s);
  ScalarField3 f(s.grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    f.data[i] = v[i].real();
    worst = std::max(worst, std::abs(v[i].imag()));
  }
  if (max_imag)
    *max_imag = worst;
  return f;
}

SpectralField ramp_multiplier(const SpectralField& s, int eta_axis, int power)
{
  if (power < 1 || power > 3)
    throw std::invalid_argument("ramp_multiplier: power must be 1, 2 or 3");
  if (eta_axis < 0 || eta_axis > 2)
    throw std::invalid_argument("ramp_multiplier: axis must be 0, 1 or 2");
  SpectralField out(s.grid);
  const int n = s.grid.n();
  for (int k3 = 0; k3 < n; ++k3) {
    for (int k2 = 0; k2 < n; ++k2) {
      for (int k1 = 0; k1 < n; ++k1) {
        Vec3 y = s.frequency(k1, k2, k3);
        y[static_cast<std::size_t>(eta_axis)] = 0.0;
        const double r = norm(y);
        const double m = power == 1 ? r : power == 2 ? r * r : r * r * r;
        out.at(k1, k2, k3) = s.at(k1, k2, k3) * m;
      }
    }
  }
  return out;
}

double hermitian_defect(const SpectralField& s, bool odd)
{
  const int n = s.grid.n();
  const auto on_lattice = [n](int k) { return !(n % 2 == 0 && k == n / 2); };
  double worst = 0.0, peak = 0.0;
  for (int k3 = 0; k3 < n; ++k3) {
    for (int k2 = 0; k2 < n; ++k2) {
      for (int k1 = 0; k1 < n; ++k1) {
        const cplx a = s.at(k1, k2, k3);
        peak = std::max(peak, std::abs(a));
        if (!on_lattice(k1) || !on_lattice(k2) || !on_lattice(k3))
          continue;
        const cplx b = std::conj(s.at(SpectralField::mirror(k1, n), SpectralField::mirror(k2, n), SpectralField::mirror(k3, n)));
        worst = std::max(worst, std::abs(odd ? a + b : a - b));
      }
    }
  }
  return peak > 0.0 ? worst / peak : 0.0;
}

ScalarField3 pad_centered(const ScalarField3& f, int padded_n)
{
  const int n = f.grid.n();
  if (padded_n < n || (padded_n - n) % 2 != 0)
    throw std::invalid_argument("pad_centered: padded size must exceed n by an even amount");
  const VoxelGrid3 big(padded_n, f.grid.extent() * padded_n / n);
  ScalarField3 out(big);
  const int off = (padded_n - n) / 2;
  for (int i3 = 0; i3 < n; ++i3)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i1 = 0; i1 < n; ++i1)
        out.at(i1 + off, i2 + off, i3 + off) = f.at(i1, i2, i3);
  return out;
}

ScalarField3 crop_centered(const ScalarField3& f, int n)
{
  const int big = f.grid.n();
  if (n > big || (big - n) % 2 != 0)
    throw std::invalid_argument("crop_centered: size must shrink by an even amount");
  const VoxelGrid3 small(n, f.grid.extent() * n / big);
  ScalarField3 out(small);
  const int off = (big - n) / 2;
  for (int i3 = 0; i3 < n; ++i3)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i1 = 0; i1 < n; ++i1)
        out.at(i1, i2, i3) = f.at(i1 + off, i2 + off, i3 + off);
  return out;
}

namespace {

// (27 - 23 cos) / 50 equals 0.54 - 0.46 cos but rounds the end values 0.08 and 1 correctly.
double hamming_window_at(double n, int N) { return (27.0 - 23.0 * std::cos(2.0 * kPi * n / (N - 1))) / 50.0; }

}  // namespace

double hamming_window(int n, int N)
{
  if (N < 2)
    throw std::invalid_argument("hamming_window: N must be >= 2");
  return hamming_window_at(n, N);
}

double hamming_at_frequency(int signed_k, int N)
{
  if (N < 2)
    throw std::invalid_argument("hamming_at_frequency: N must be >= 2");
  return hamming_window_at(signed_k + 0.5 * (N - 1), N);
}

std::vector<double> ramlak_response(int N, double tau)
{
  std::vector<double> resp(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    double acc = 1.0 / (4.0 * tau * tau);
    for (int m = 1; m <= N / 2; ++m) {
      if (m % 2 == 0)
        continue;
      // both +m and -m taps; at m == N/2 (even N) they coincide on the circle
      const double taps = (2 * m == N) ? 1.0 : 2.0;
      acc += taps * (-1.0 / (kPi * kPi * m * m * tau * tau)) * std::cos(2.0 * kPi * k * m / N);
    }
    resp[static_cast<std::size_t>(k)] = 2.0 * kPi * tau * acc;
  }
  return resp;
}

namespace {

int padded_length(int cols, int pad_factor)
{
  if (cols < 1 || pad_factor < 1)
    throw std::invalid_argument("row filter: invalid length or padding factor");
  return cols * pad_factor;
}

/// Applies a per-bin complex multiplier to each zero-padded row, keeps the real part.
std::vector<double> filter_rows(std::span<const double> rows, int cols, int padded, const std::vector<cplx>& mult)
{
  if (rows.size() % static_cast<std::size_t>(cols) != 0)
    throw std::invalid_argument("row filter: data length is not a multiple of the row length");
  const std::size_t n_rows = rows.size() / static_cast<std::size_t>(cols);
  std::vector<double> out(rows.size());

  FftwBuffer probe(static_cast<std::size_t>(padded));
  FftwPlan fwd, bwd;
  {
    std::lock_guard lock(planner_mutex());
    fwd.plan = fftw_plan_dft_1d(padded, probe.ptr, probe.ptr, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd.plan = fftw_plan_dft_1d(padded, probe.ptr, probe.ptr, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!fwd.plan || !bwd.plan)
    throw std::runtime_error("FFTW planning failed");
  const double scale = 1.0 / padded;

#pragma omp parallel num_threads(default_threads())
  {
    FftwBuffer buf(static_cast<std::size_t>(padded));
    cplx* b = buf.data();
#pragma omp for schedule(static)
    for (std::size_t r = 0; r < n_rows; ++r) {
      const double* src = rows.data() + r * static_cast<std::size_t>(cols);
      for (int i = 0; i < padded; ++i)
        b[i] = i < cols ? cplx{src[i], 0.0} : cplx{0.0, 0.0};
      fftw_execute_dft(fwd.plan, buf.ptr, buf.ptr);
      for (int k = 0; k < padded; ++k)
        b[k] *= mult[static_cast<std::size_t>(k)];
      fftw_execute_dft(bwd.plan, buf.ptr, buf.ptr);
      double* dst = out.data() + r * static_cast<std::size_t>(cols);
      for (int i = 0; i < cols; ++i)
        dst[i] = b[i].real() * scale;
    }
  }
  return out;
}

}  // namespace

std::vector<double> ramp_filter_sinogram(std::span<const double> rows, int cols, double tau, int pad_factor)
{
  const int padded = padded_length(cols, pad_factor);
  const std::vector<double> resp = ramlak_response(padded, tau);
  std::vector<cplx> mult(resp.begin(), resp.end());
  return filter_rows(rows, cols, padded, mult);
}

std::vector<double> hamming_derivative(std::span<const double> rows, int cols, double tau, int pad_factor)
{
  const int padded = padded_length(cols, pad_factor);
  if (padded < 2)
    throw std::invalid_argument("hamming_derivative: need at least two samples");
  std::vector<cplx> mult(static_cast<std::size_t>(padded));
  for (int k = 0; k < padded; ++k) {
    const int ks = signed_frequency(k, padded);
    if (padded % 2 == 0 && ks == -padded / 2) {
      mult[static_cast<std::size_t>(k)] = 0.0;  // Nyquist bin of a real signal has no derivative
      continue;
    }
    const double sigma = 2.0 * kPi * ks / (padded * tau);
    mult[static_cast<std::size_t>(k)] = cplx{0.0, sigma * hamming_at_frequency(ks, padded)};
  }
  return filter_rows(rows, cols, padded, mult);
}

}  // namespace trt
