#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include <Eigen/Dense>

#include "trt/phantoms.hpp"
#include "trt/projector.hpp"

using namespace trt;

namespace {

SymTensorField3 random_field(const VoxelGrid3& g, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SymTensorField3 f(g);
  for (double& v : f.data)
    v = u(rng);
  return f;
}

SymTensorField3 constant_field(const VoxelGrid3& g, const SymTensor3& t)
{
  SymTensorField3 f(g);
  for (std::size_t v = 0; v < g.voxel_count(); ++v)
    f.set_tensor(v, t);
  return f;
}

Vec3 voxel_centre(const VoxelGrid3& g, std::size_t v)
{
  const std::size_t n = static_cast<std::size_t>(g.n());
  return {g.center(static_cast<int>(v % n)), g.center(static_cast<int>((v / n) % n)), g.center(static_cast<int>(v / (n * n)))};
}

}  // namespace

TEST_CASE("trace_ray")
{
  SUBCASE("axis-aligned ray through the centre")
  {
    const VoxelGrid3 g(5, 1.0);
    const auto hits = trace_ray(g, Ray::make(unit_axis(0), {0.0, 0.0, 0.0}));
    REQUIRE(hits.size() == 5);
    for (const auto& h : hits)
      CHECK(h.length == doctest::Approx(g.voxel_size()).epsilon(1e-14));
  }

  SUBCASE("face diagonal of a two-voxel grid")
  {
    const VoxelGrid3 g(2, 1.0);
    const double s = 1.0 / std::sqrt(2.0);
    const Ray ray = Ray::make({s, s, 0.0}, {0.0, 0.0, 0.5});
    const auto hits = trace_ray(g, ray);
    double sum = 0.0;
    for (const auto& h : hits)
      sum += h.length;
    CHECK(sum == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(sum - chord_length(g, ray)) < 1e-9);
  }

  SUBCASE("ray parallel to a face outside the box")
  {
    const VoxelGrid3 g(4, 1.0);
    CHECK(trace_ray(g, Ray::make(unit_axis(0), {0.0, 2.0, 0.0})).empty());
    CHECK(chord_length(g, Ray::make(unit_axis(0), {0.0, 2.0, 0.0})) == 0.0);
  }

  SUBCASE("random rays: positive lengths, ordered, summing to the chord")
  {
    const VoxelGrid3 g(7, 1.3);
    std::mt19937_64 rng(42);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      Vec3 d{nd(rng), nd(rng), nd(rng)};
      d = (1.0 / norm(d)) * d;
      Vec3 b{ud(rng), ud(rng), ud(rng)};
      b = b - dot(b, d) * d;
      const Ray ray = Ray::make(d, b);
      const auto hits = trace_ray(g, ray);
      double sum = 0.0, last_t = -1e300;
      bool ordered = true, positive = true;
      for (const auto& h : hits) {
        sum += h.length;
        positive = positive && h.length > 0.0;
        const double t = dot(voxel_centre(g, h.voxel), d);
        ordered = ordered && t > last_t - g.voxel_size() * std::sqrt(3.0);
        last_t = std::max(last_t, t);
      }
      CHECK(positive);
      CHECK(ordered);
      CHECK(std::abs(sum - chord_length(g, ray)) < 1e-9);
    }
  }

  CHECK_THROWS_AS(trace_ray(VoxelGrid3(3, 1.0), Ray{{1.0, 0.1, 0.0}, {0, 0, 0}}), std::invalid_argument);
}

TEST_CASE("forward_trt_ray")
{
  const VoxelGrid3 g(9, 1.0);

  SUBCASE("constant diag(1,0,0) about e1")
  {
    const SymTensorField3 f = constant_field(g, SymTensor3{{1, 0, 0, 0, 0, 0}});
    for (double theta : {0.0, 0.7, 2.2}) {
      const AxisFrame fr(0, theta);
      const Ray ray = fr.ray(0.0, 0.0);
      const TrtSample m = forward_trt_ray(f, fr, ray);
      CHECK(m.axial == doctest::Approx(chord_length(g, ray)).epsilon(1e-13));
      CHECK(m.j1 == 0.0);
      CHECK(m.j2 == 0.0);
    }
  }

  SUBCASE("constant f13 about e1 with xi = e2")
  {
    const double c = 0.7;
    const SymTensorField3 f = constant_field(g, SymTensor3{{0, 0, c, 0, 0, 0}});
    const AxisFrame fr(0, 0.0);
    CHECK(fr.zeta[2] == doctest::Approx(-1.0));
    const Ray ray = fr.ray(0.0, 0.0);
    const TrtSample m = forward_trt_ray(f, fr, ray);
    CHECK(m.j1 == doctest::Approx(-c * chord_length(g, ray)).epsilon(1e-13));
  }

  SUBCASE("dense per-voxel oracle on random fields")
  {
    const SymTensorField3 f = random_field(g, 9);
    for (int axis = 0; axis < 3; ++axis) {
      const AxisFrame fr(axis, 0.9 + axis);
      const Ray ray = fr.ray(0.13, -0.21);
      double axial = 0.0, j1 = 0.0, j2 = 0.0;
      const Eigen::Vector3d eta(fr.eta[0], fr.eta[1], fr.eta[2]);
      const Eigen::Vector3d zeta(fr.zeta[0], fr.zeta[1], fr.zeta[2]);
      for (const auto& h : trace_ray(g, ray)) {
        const SymTensor3 t = f.tensor(h.voxel);
        Eigen::Matrix3d m;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            m(i, j) = t(i, j);
        Eigen::Vector3d xi(ray.dir[0], ray.dir[1], ray.dir[2]);
        const Eigen::Matrix3d pi = Eigen::Matrix3d::Identity() - xi * xi.transpose();
        const Eigen::Matrix3d p = pi * m * pi;
        axial += h.length * eta.dot(p * eta);
        j1 += h.length * zeta.dot(p * eta);
        j2 += h.length * zeta.dot(p * zeta);
      }
      const TrtSample s = forward_trt_ray(f, fr, ray);
      CHECK(s.axial == doctest::Approx(axial).epsilon(1e-12));
      CHECK(s.j1 == doctest::Approx(j1).epsilon(1e-12));
      CHECK(s.j2 == doctest::Approx(j2).epsilon(1e-12));
    }
  }

  SUBCASE("Gaussian bump along a voxel-centre ray")
  {
    const VoxelGrid3 g32(32, 1.0);
    const GaussianBump bump{1.0, {0.5, 0.5, 0.5}};
    SymTensorField3 f(g32);
    for (int i3 = 0; i3 < 32; ++i3)
      for (int i2 = 0; i2 < 32; ++i2)
        for (int i1 = 0; i1 < 32; ++i1)
          f.voxel(g32.index(i1, i2, i3))[5] = bump({g32.center(i1), g32.center(i2), g32.center(i3)});
    const double y = g32.center(23), z = g32.center(23);
    const AxisFrame fr(1, kPi / 2);  // zeta = e1 x e2 = e3, so J2 sees f33
    const Ray ray = Ray::make(unit_axis(0), {0.0, y, z});
    const double d2 = (y - 0.5) * (y - 0.5) + (z - 0.5) * (z - 0.5);
    const double expect = std::sqrt(kPi / 50.0) * std::exp(-50.0 * d2);
    CHECK(forward_trt_ray(f, fr, ray).axial == 0.0);
    CHECK(std::abs(forward_trt_ray(f, fr, ray).j2 - expect) < 0.02 * expect);
  }

  CHECK_THROWS_AS(forward_trt_ray(SymTensorField3(g), AxisFrame(0, 0.0), Ray::make(unit_axis(0), {0, 0, 0})),
                  std::invalid_argument);
}

TEST_CASE("planar transforms")
{
  const VoxelGrid3 g(8, 1.0);

  SUBCASE("vector slab equal to xi and orthogonal to xi")
  {
    const double th = 0.6;
    const AxisFrame fr(2, th);
    const Ray ray = fr.ray(g.center(3), 0.11);
    VectorSlab along{8, 2, 3, std::vector<double>(2 * 64)};
    VectorSlab across{8, 2, 3, std::vector<double>(2 * 64)};
    for (std::size_t p = 0; p < 64; ++p) {
      along.data[2 * p] = ray.dir[0];
      along.data[2 * p + 1] = ray.dir[1];
      across.data[2 * p] = -ray.dir[1];
      across.data[2 * p + 1] = ray.dir[0];
    }
    CHECK(lrt_plane(along, g, ray) == doctest::Approx(chord_length(g, ray)).epsilon(1e-13));
    CHECK(std::abs(lrt_plane(across, g, ray)) < 1e-14);
  }

  SUBCASE("non-axial components equal planar transforms of the slabs, bit-exact")
  {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const SymTensorField3 f = random_field(g, 100 + seed);
      for (int axis = 0; axis < 3; ++axis) {
        for (int s = 0; s < 8; s += 3) {
          const VectorSlab cs = cross_axis_slab(f, axis, s);
          const TensorSlab as = adjugate_slab(slice_field(f, axis, s));
          for (double th : {0.0, 0.37, 1.9, 4.4}) {
            const AxisFrame fr(axis, th);
            for (double p : {-0.61, 0.0, 0.25}) {
              const Ray ray = fr.ray(g.center(s), p);
              const TrtSample m = forward_trt_ray(f, fr, ray);
              CHECK(m.j1 == lrt_plane(cs, g, ray));
              CHECK(m.j2 == lrt_plane(as, g, ray));
            }
          }
        }
      }
    }
  }

  SUBCASE("ray leaving the plane")
  {
    const VectorSlab cs = cross_axis_slab(SymTensorField3(g), 2, 3);
    CHECK_THROWS_AS(lrt_plane(cs, g, Ray::make({0.0, 0.6, 0.8}, {0.0, 0.0, 0.0})), std::invalid_argument);
  }
}

TEST_CASE("simulate_acquisition")
{
  const VoxelGrid3 g(12, 1.0);
  AcquisitionConfig cfg;
  cfg.n_angles = 8;

  SUBCASE("zero field gives zero data")
  {
    const TrtDataSet d = simulate_acquisition(SymTensorField3(g), cfg);
    for (double v : d.data)
      CHECK(v == 0.0);
  }

  SUBCASE("no noise, no binning: the serial per-ray values exactly, at any thread count")
  {
    const SymTensorField3 f = random_field(g, 3);
    const TrtDataSet ref = reference::forward_acquisition(f, cfg.resolved(g));
    CHECK(simulate_acquisition(f, cfg, Exec{1}).data == ref.data);
    CHECK(simulate_acquisition(f, cfg, Exec{4}).data == ref.data);
    CHECK(ref.cols == default_detector_width(12, 1));
  }

  SUBCASE("seeded noise is repeatable")
  {
    const SymTensorField3 f = smooth_phantom(g);
    cfg.noise_pct = 0.01;
    cfg.seed = 5;
    const TrtDataSet a = simulate_acquisition(f, cfg, Exec{1});
    const TrtDataSet b = simulate_acquisition(f, cfg, Exec{3});
    CHECK(a.data == b.data);
    cfg.seed = 6;
    CHECK(simulate_acquisition(f, cfg).data != a.data);

    cfg.noise_pct = 0.0;
    const TrtDataSet clean = simulate_acquisition(f, cfg);
    double peak = 0.0, ss = 0.0;
    for (double v : clean.data)
      peak = std::max(peak, std::abs(v));
    for (std::size_t i = 0; i < clean.data.size(); ++i)
      ss += (a.data[i] - clean.data[i]) * (a.data[i] - clean.data[i]);
    const double sd = std::sqrt(ss / static_cast<double>(clean.data.size()));
    CHECK(sd == doctest::Approx(0.01 * peak).epsilon(0.05));
  }

  SUBCASE("linearity")
  {
    const SymTensorField3 f = random_field(g, 1), h = random_field(g, 2);
    SymTensorField3 mix(g);
    for (std::size_t i = 0; i < mix.data.size(); ++i)
      mix.data[i] = 2.0 * f.data[i] - 0.5 * h.data[i];
    const TrtDataSet df = simulate_acquisition(f, cfg), dh = simulate_acquisition(h, cfg), dm = simulate_acquisition(mix, cfg);
    for (std::size_t i = 0; i < dm.data.size(); ++i)
      CHECK(std::abs(dm.data[i] - (2.0 * df.data[i] - 0.5 * dh.data[i])) < 1e-10);
  }

  SUBCASE("reversing the ray keeps axial and J2 and flips J1")
  {
    const TrtDataSet d = simulate_acquisition(random_field(g, 8), cfg);
    for (int slot = 0; slot < 3; ++slot)
      for (int j = 0; j < 4; ++j)
        for (int r = 0; r < d.rows; ++r)
          for (int c = 0; c < d.cols; ++c) {
            const int cr = d.cols - 1 - c;
            CHECK(d.at(slot, j + 4, r, cr, kAxial) == doctest::Approx(d.at(slot, j, r, c, kAxial)).epsilon(1e-10));
            CHECK(d.at(slot, j + 4, r, cr, kJ2) == doctest::Approx(d.at(slot, j, r, c, kJ2)).epsilon(1e-10));
            CHECK(d.at(slot, j + 4, r, cr, kJ1) == doctest::Approx(-d.at(slot, j, r, c, kJ1)).epsilon(1e-10));
          }
  }

  SUBCASE("binning is block mean pooling")
  {
    const SymTensorField3 f = random_field(g, 4);
    const TrtDataSet fine = simulate_acquisition(f, cfg);
    cfg.bin_factor = 3;
    cfg.detector_w = 0;
    const TrtDataSet fine3 = reference::forward_acquisition(f, cfg.resolved(g));
    const TrtDataSet coarse = simulate_acquisition(f, cfg);
    CHECK(coarse.rows == 4);
    CHECK(coarse.cols == fine3.cols / 3);
    CHECK(coarse.pitch == doctest::Approx(3 * g.voxel_size()));
    double sum = 0.0;
    for (int dr = 0; dr < 3; ++dr)
      for (int dc = 0; dc < 3; ++dc)
        sum += fine3.at(1, 2, 3 + dr, 6 + dc, kJ2);
    CHECK(coarse.at(1, 2, 1, 2, kJ2) == doctest::Approx(sum / 9.0).epsilon(1e-14));
    CHECK(fine.cols == default_detector_width(12, 1));
  }

  SUBCASE("invalid configurations")
  {
    AcquisitionConfig bad = cfg;
    bad.n_angles = 0;
    CHECK_THROWS_AS(simulate_acquisition(SymTensorField3(g), bad), std::invalid_argument);
    bad = cfg;
    bad.bin_factor = 5;
    CHECK_THROWS_AS(simulate_acquisition(SymTensorField3(g), bad), std::invalid_argument);
    bad = cfg;
    bad.axes = {unit_axis(0), unit_axis(0)};
    CHECK_THROWS_AS(simulate_acquisition(SymTensorField3(g), bad), std::invalid_argument);
    bad = cfg;
    bad.axes = {Vec3{0.6, 0.8, 0.0}};
    CHECK_THROWS_AS(simulate_acquisition(SymTensorField3(g), bad), std::invalid_argument);
    bad = cfg;
    bad.noise_pct = -0.1;
    CHECK_THROWS_AS(simulate_acquisition(SymTensorField3(g), bad), std::invalid_argument);
  }
}

TEST_CASE("detector width keeps columns on voxel centres")
{
  CHECK(default_detector_width(64, 1) == 86);
  CHECK(default_detector_width(96, 3) % 3 == 0);
  CHECK((default_detector_width(96, 3) / 3 - 32) % 2 == 0);
  CHECK_THROWS_AS(default_detector_width(10, 3), std::invalid_argument);
}
