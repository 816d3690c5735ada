#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "trt/backprojection.hpp"
#include "trt/spectral.hpp"

using namespace trt;

namespace {

ScalarField3 random_scalar(const VoxelGrid3& g, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ScalarField3 f(g);
  for (double& v : f.data)
    v = nd(rng);
  return f;
}

double l2(const std::vector<double>& v)
{
  double s = 0.0;
  for (double x : v)
    s += x * x;
  return std::sqrt(s);
}

// Grid whose bin k sits at angular frequency exactly k.
VoxelGrid3 unit_frequency_grid(int n) { return VoxelGrid3(n, kPi); }

}  // namespace

TEST_CASE("dft3 round trip and Parseval")
{
  const VoxelGrid3 g(10, 1.0);
  const ScalarField3 f = random_scalar(g, 1);
  const SpectralField s = dft3(f);
  double imag = 1.0;
  const ScalarField3 back = idft3(s, &imag);
  double err = 0.0, ref = 0.0, spec = 0.0;
  for (std::size_t i = 0; i < f.data.size(); ++i) {
    err = std::max(err, std::abs(back.data[i] - f.data[i]));
    ref += f.data[i] * f.data[i];
    spec += std::norm(s.data[i]);
  }
  CHECK(err < 1e-10 * std::sqrt(ref));
  CHECK(imag < 1e-12);
  CHECK(spec == doctest::Approx(ref).epsilon(1e-9));
  CHECK(hermitian_defect(s) < 1e-12);
}

TEST_CASE("dft3 of a delta and of a lattice sinusoid")
{
  const VoxelGrid3 g(8, 1.0);
  ScalarField3 delta(g);
  delta.at(0, 0, 0) = 1.0;
  for (const cplx& v : dft3(delta).data)
    CHECK(std::abs(v) == doctest::Approx(1.0 / std::sqrt(512.0)).epsilon(1e-13));

  ScalarField3 wave(g);
  for (int i3 = 0; i3 < 8; ++i3)
    for (int i2 = 0; i2 < 8; ++i2)
      for (int i1 = 0; i1 < 8; ++i1)
        wave.at(i1, i2, i3) = std::cos(2.0 * kPi * (2 * i1 + i3) / 8.0);
  const SpectralField s = dft3(wave);
  int nonzero = 0;
  for (int k3 = 0; k3 < 8; ++k3)
    for (int k2 = 0; k2 < 8; ++k2)
      for (int k1 = 0; k1 < 8; ++k1)
        if (std::abs(s.at(k1, k2, k3)) > 1e-10) {
          ++nonzero;
          const bool plus = k1 == 2 && k2 == 0 && k3 == 1;
          const bool minus = k1 == 6 && k2 == 0 && k3 == 7;
          CHECK((plus || minus));
        }
  CHECK(nonzero == 2);
}

TEST_CASE("ramp_multiplier")
{
  const VoxelGrid3 g = unit_frequency_grid(12);
  SpectralField s(g);
  for (cplx& v : s.data)
    v = cplx{1.0, -0.5};
  CHECK(s.frequency(5) == doctest::Approx(5.0));

  SUBCASE("axial frequency is annihilated, 3-4-5 scales by 5")
  {
    const SpectralField r = ramp_multiplier(s, 0, 1);
    CHECK(std::abs(r.at(5, 0, 0)) == 0.0);
    CHECK(r.at(0, 3, 4).real() == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(r.at(7, 3, 4).real() == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(std::abs(r.at(0, 0, 0)) == 0.0);
  }

  SUBCASE("powers compose")
  {
    const SpectralField one = ramp_multiplier(s, 2, 1);
    const SpectralField two = ramp_multiplier(one, 2, 1);
    const SpectralField three = ramp_multiplier(two, 2, 1);
    const SpectralField p2 = ramp_multiplier(s, 2, 2);
    const SpectralField p3 = ramp_multiplier(s, 2, 3);
    for (std::size_t i = 0; i < s.data.size(); ++i) {
      CHECK(std::abs(p2.data[i] - two.data[i]) <= 1e-12 * std::abs(two.data[i]));
      CHECK(std::abs(p3.data[i] - three.data[i]) <= 1e-12 * std::abs(three.data[i]));
    }
  }

  SUBCASE("commutes with translation")
  {
    const VoxelGrid3 g2(9, 1.0);
    const ScalarField3 f = random_scalar(g2, 4);
    ScalarField3 shifted(g2);
    for (int i3 = 0; i3 < 9; ++i3)
      for (int i2 = 0; i2 < 9; ++i2)
        for (int i1 = 0; i1 < 9; ++i1)
          shifted.at((i1 + 2) % 9, (i2 + 1) % 9, i3) = f.at(i1, i2, i3);
    const ScalarField3 a = idft3(ramp_multiplier(dft3(f), 1, 3));
    const ScalarField3 b = idft3(ramp_multiplier(dft3(shifted), 1, 3));
    double err = 0.0, ref = 0.0;
    for (int i3 = 0; i3 < 9; ++i3)
      for (int i2 = 0; i2 < 9; ++i2)
        for (int i1 = 0; i1 < 9; ++i1) {
          err = std::max(err, std::abs(b.at((i1 + 2) % 9, (i2 + 1) % 9, i3) - a.at(i1, i2, i3)));
          ref = std::max(ref, std::abs(a.at(i1, i2, i3)));
        }
    CHECK(err < 1e-9 * ref);
  }

  CHECK_THROWS_AS(ramp_multiplier(s, 0, 4), std::invalid_argument);
  CHECK_THROWS_AS(ramp_multiplier(s, 3, 1), std::invalid_argument);
}

TEST_CASE("odd Hermitian defect")
{
  const VoxelGrid3 g(7, 1.0);
  SpectralField s = dft3(random_scalar(g, 2));
  for (cplx& v : s.data)
    v *= cplx{0.0, 1.0};
  CHECK(hermitian_defect(s, true) < 1e-12);
  CHECK(hermitian_defect(s, false) > 0.1);
}

TEST_CASE("centred padding")
{
  const VoxelGrid3 g(6, 1.5);
  const ScalarField3 f = random_scalar(g, 3);
  const ScalarField3 p = pad_centered(f, 10);
  CHECK(p.grid.voxel_size() == doctest::Approx(g.voxel_size()));
  CHECK(p.at(2, 2, 2) == f.at(0, 0, 0));
  CHECK(p.at(0, 5, 5) == 0.0);
  CHECK(crop_centered(p, 6).data == f.data);
  CHECK_THROWS_AS(pad_centered(f, 9), std::invalid_argument);
}

TEST_CASE("Hamming window values")
{
  for (int N : {5, 11, 121}) {
    CHECK(hamming_window(0, N) == 0.08);
    CHECK(hamming_window((N - 1) / 2, N) == 1.0);
    CHECK(hamming_window(N - 1, N) == doctest::Approx(0.08).epsilon(1e-12));
    CHECK(hamming_at_frequency(0, N) == 1.0);
  }
  CHECK(hamming_at_frequency(-5, 11) == 0.08);
  CHECK_THROWS_AS(hamming_window(0, 1), std::invalid_argument);
}

TEST_CASE("hamming_derivative")
{
  const int N = 64;
  const double tau = 0.05;
  const double L = N * tau;

  SUBCASE("zero and constant rows")
  {
    std::vector<double> zero(2 * N, 0.0);
    for (double v : hamming_derivative(zero, N, tau))
      CHECK(v == 0.0);
    std::vector<double> flat(N, 3.0);
    for (double v : hamming_derivative(flat, N, tau, 1))
      CHECK(std::abs(v) < 1e-12);
  }

  SUBCASE("sinusoid: cosine scaled by the window")
  {
    for (int m : {1, 3, 7}) {
      std::vector<double> row(N);
      for (int i = 0; i < N; ++i)
        row[static_cast<std::size_t>(i)] = std::sin(2.0 * kPi * m * i * tau / L);
      const std::vector<double> d = hamming_derivative(row, N, tau, 1);
      const double amp = 2.0 * kPi * m / L * hamming_at_frequency(m, N);
      double worst = 0.0;
      for (int i = 0; i < N; ++i)
        worst = std::max(worst, std::abs(d[static_cast<std::size_t>(i)] - amp * std::cos(2.0 * kPi * m * i * tau / L)));
      CHECK(worst < 1e-6 * amp);
    }
  }
}

TEST_CASE("Ram-Lak filter")
{
  const int N = 128;
  const double tau = 0.02;
  const std::vector<double> resp = ramlak_response(N, tau);
  CHECK(resp[0] > 0.0);
  CHECK(resp[0] < 0.02 * resp[N / 4]);
  const double sigma = 2.0 * kPi * (N / 4) / (N * tau);
  CHECK(resp[N / 4] == doctest::Approx(sigma).epsilon(0.01));
  CHECK(resp[3 * N / 4] == doctest::Approx(resp[N / 4]).epsilon(1e-12));

  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  std::vector<double> a(3 * N), b(3 * N), ab(3 * N), zero(3 * N, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = nd(rng);
    b[i] = nd(rng);
    ab[i] = a[i] + b[i];
  }
  const auto fa = ramp_filter_sinogram(a, N, tau), fb = ramp_filter_sinogram(b, N, tau), fab = ramp_filter_sinogram(ab, N, tau);
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    err = std::max(err, std::abs(fab[i] - fa[i] - fb[i]));
  CHECK(err < 1e-10 * l2(fab));
  for (double v : ramp_filter_sinogram(zero, N, tau))
    CHECK(v == 0.0);
}

TEST_CASE("scalar FBP recovers a centred disk")
{
  const int n = 256;
  const VoxelGrid3 g(n, 1.0);
  const double radius = 0.5;
  std::vector<double> image(static_cast<std::size_t>(n) * n, 0.0);
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u)
      if (g.center(u) * g.center(u) + g.center(v) * g.center(v) <= radius * radius)
        image[static_cast<std::size_t>(u + n * v)] = 1.0;
  const SinogramGeometry geom{360, default_detector_width(n, 1), g.voxel_size()};
  const std::vector<double> sino = project_plane(image, geom, g, 2, n / 2);
  const std::vector<double> filtered = ramp_filter_sinogram(sino, geom.cols, geom.pitch);
  std::vector<double> rec = backproject_plane(filtered, geom, g, 2, n / 2);
  double err = 0.0, ref = 0.0;
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u) {
      const double r2 = g.center(u) * g.center(u) + g.center(v) * g.center(v);
      if (r2 > 0.8 * 0.8 * radius * radius)
        continue;
      const std::size_t p = static_cast<std::size_t>(u + n * v);
      const double value = 0.5 * rec[p];
      err += (value - 1.0) * (value - 1.0);
      ref += 1.0;
    }
  CHECK(std::sqrt(err / ref) < 0.05);
}
