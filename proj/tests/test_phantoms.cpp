#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "trt/phantoms.hpp"
#include "trt/projector.hpp"

using namespace trt;

namespace {

double max_abs(const std::vector<double>& v)
{
  double m = 0.0;
  for (double x : v)
    m = std::max(m, std::abs(x));
  return m;
}

/// Largest |data| over one acquired axis and one component.
double max_component(const TrtDataSet& d, int slot, int comp)
{
  double m = 0.0;
  for (int j = 0; j < d.n_angles; ++j)
    for (int r = 0; r < d.rows; ++r)
      for (int c = 0; c < d.cols; ++c)
        m = std::max(m, std::abs(d.at(slot, j, r, c, comp)));
  return m;
}

double max_slot(const TrtDataSet& d, int slot)
{
  return std::max({max_component(d, slot, kAxial), max_component(d, slot, kJ1), max_component(d, slot, kJ2)});
}

Displacement linear_displacement(const std::array<Vec3, 3>& rows)
{
  Displacement u;
  u.value = [rows](const Vec3& x) { return Vec3{dot(rows[0], x), dot(rows[1], x), dot(rows[2], x)}; };
  u.jacobian = [rows](const Vec3&) { return rows; };
  return u;
}

}  // namespace

TEST_CASE("smooth phantom values")
{
  const double f12 = smooth_component(1, {0.5, -0.5, 0.5});
  CHECK(f12 == doctest::Approx(1.0 - std::exp(-100.0)).epsilon(1e-15));
  CHECK(std::abs(smooth_component(0, {10.0, 10.0, 10.0})) < 1e-300);
  CHECK(smooth_component(3, {0.5, 0.5, 0.5}) == 0.0);
  CHECK(smooth_component(5, {0.5, 0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-12));

  const VoxelGrid3 g(12, 1.0);
  const SymTensorField3 f = smooth_phantom(g);
  for (int i3 = 0; i3 < 12; ++i3)
    for (int i2 = 0; i2 < 12; ++i2)
      for (int i1 = 0; i1 < 12; ++i1) {
        const Vec3 x{g.center(i1), g.center(i2), g.center(i3)};
        const auto v = f.voxel(g.index(i1, i2, i3));
        for (int c = 0; c < 6; ++c) {
          double direct = 0.0;
          for (const GaussianBump& b : smooth_phantom_table()[static_cast<std::size_t>(c)]) {
            const Vec3 d = x - b.a;
            direct += b.alpha * std::exp(-50.0 * dot(d, d));
          }
          CHECK(v[static_cast<std::size_t>(c)] == direct);
        }
      }
  CHECK(smooth_phantom(g).data == f.data);
}

TEST_CASE("sharp phantom boxes")
{
  const BoxSpec& b11 = sharp_phantom_table()[0];
  CHECK(b11.contains({0.0, 0.0, 0.0}));
  CHECK_FALSE(b11.contains({0.5, 0.0, 0.0}));
  CHECK(b11.I[2][0] == -0.8);
  CHECK(b11.I[2][1] == 0.8);

  const int n = 40;
  const VoxelGrid3 g(n, 1.0);
  const SymTensorField3 f = sharp_phantom(g);
  CHECK(f.tensor(g.index(n / 2, n / 2, n / 2))(0, 0) == 1.0);
  for (int c = 0; c < 6; ++c) {
    double count = 0.0;
    for (std::size_t v = 0; v < g.voxel_count(); ++v)
      count += f.voxel(v)[static_cast<std::size_t>(c)];
    const double fraction = count / static_cast<double>(g.voxel_count());
    CHECK(fraction == doctest::Approx(sharp_phantom_table()[static_cast<std::size_t>(c)].volume() / 8.0).epsilon(1e-9));
  }
  CHECK(sharp_phantom_table()[5].volume() == doctest::Approx(0.8 * 1.6 * 0.8));
  CHECK(sharp_phantom(g).data == f.data);
}

TEST_CASE("potential fields")
{
  const VoxelGrid3 g(8, 1.0);

  SUBCASE("linear displacements")
  {
    const SymTensorField3 stretch = potential_field(g, linear_displacement({{{1, 0, 0}, {0, 0, 0}, {0, 0, 0}}}));
    const SymTensorField3 shear = potential_field(g, linear_displacement({{{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}}));
    for (std::size_t v = 0; v < g.voxel_count(); ++v) {
      CHECK(stretch.tensor(v) == SymTensor3{{2, 0, 0, 0, 0, 0}});
      CHECK(shear.tensor(v) == SymTensor3{{0, 2, 0, 0, 0, 0}});
    }
    // sampled version: stencils are exact on linear data
    const SymTensorField3 sampled = potential_field(sample_displacement(g, linear_displacement({{{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}})));
    for (std::size_t v = 0; v < g.voxel_count(); ++v)
      for (int c = 0; c < 6; ++c)
        CHECK(sampled.voxel(v)[static_cast<std::size_t>(c)] == doctest::Approx(c == 1 ? 2.0 : 0.0).epsilon(1e-12));
  }

  SUBCASE("differences converge to the analytic partials")
  {
    const Displacement u = gaussian_displacement({{{1.0, {0.1, 0.0, -0.1}, 4.0}, {-0.5, {0.0, 0.2, 0.0}, 4.0}, {0.7, {-0.1, 0.0, 0.1}, 4.0}}});
    double previous = 0.0;
    for (int n : {24, 48}) {
      const VoxelGrid3 gn(n, 1.0);
      const SymTensorField3 exact = potential_field(gn, u);
      VectorField3 s = sample_displacement(gn, u);
      std::array<ScalarField3, 3> comps{s.component(0), s.component(1), s.component(2)};
      double err = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
          const ScalarField3 a = central_difference(comps[static_cast<std::size_t>(i)], j);
          const ScalarField3 b = central_difference(comps[static_cast<std::size_t>(j)], i);
          const ScalarField3 ref = exact.component(SymTensor3::slot(i, j));
          for (std::size_t v = 0; v < a.data.size(); ++v)
            err = std::max(err, std::abs(a.data[v] + b.data[v] - ref.data[v]));
        }
      if (previous > 0.0)
        CHECK(err < 0.3 * previous);  // second order: about a quarter per halving
      previous = err;
    }
    CHECK(previous < 0.05);
  }

  SUBCASE("planar compatibility of a potential field")
  {
    const int n = 48;
    const VoxelGrid3 gn(n, 1.0);
    const Displacement u = gaussian_displacement({{{1.0, {0.1, 0.0, 0.0}, 5.0}, {-0.6, {0.0, -0.1, 0.0}, 5.0}, {0.0, {0.0, 0.0, 0.0}, 5.0}}});
    const SymTensorField3 f = potential_field(gn, u);
    const ScalarField3 f11 = f.component(0), f22 = f.component(3), f12 = f.component(1);
    const ScalarField3 a = central_difference(central_difference(f11, 1), 1);
    const ScalarField3 b = central_difference(central_difference(f22, 0), 0);
    const ScalarField3 c = central_difference(central_difference(f12, 0), 1);
    double w = 0.0, scale = 0.0;
    for (int i3 = 2; i3 < n - 2; ++i3)
      for (int i2 = 2; i2 < n - 2; ++i2)
        for (int i1 = 2; i1 < n - 2; ++i1) {
          w = std::max(w, std::abs(a.at(i1, i2, i3) + b.at(i1, i2, i3) - 2.0 * c.at(i1, i2, i3)));
          scale = std::max(scale, std::abs(a.at(i1, i2, i3)));
        }
    CHECK(w < 0.02 * scale);
  }
}

TEST_CASE("difference and integral stencils")
{
  const int n = 32;
  const VoxelGrid3 g(n, 1.0);
  ScalarField3 cubic(g);
  for (int i3 = 0; i3 < n; ++i3)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i1 = 0; i1 < n; ++i1) {
        const double x = g.center(i2);
        cubic.at(i1, i2, i3) = x * x * x;
      }
  // fourth order is exact on cubics away from the faces
  const ScalarField3 d = fourth_order_difference(cubic, 1);
  for (int i2 = 2; i2 < n - 2; ++i2) {
    const double x = g.center(i2);
    CHECK(d.at(3, i2, 5) == doctest::Approx(3.0 * x * x).epsilon(1e-10));
  }
  CHECK(central_difference(cubic, 0).data == std::vector<double>(cubic.data.size(), 0.0));

  // integral of a cosine from the low face
  ScalarField3 cosine(g);
  for (int i3 = 0; i3 < n; ++i3)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i1 = 0; i1 < n; ++i1)
        cosine.at(i1, i2, i3) = 3.0 * std::cos(3.0 * g.center(i3));
  const ScalarField3 integral = cumulative_integral(cosine, 2);
  for (int i3 = 0; i3 < n; ++i3)
    CHECK(integral.at(1, 2, i3) == doctest::Approx(std::sin(3.0 * g.center(i3)) - std::sin(-3.0)).epsilon(0.01));
  CHECK_THROWS_AS(cumulative_integral(cosine, 3), std::invalid_argument);
  CHECK_THROWS_AS(fourth_order_difference(cosine, -1), std::invalid_argument);
}

TEST_CASE("one-axis null field")
{
  const VoxelGrid3 g(32, 1.0);

  SUBCASE("zero generator gives the zero field")
  {
    const NullFieldResult r = one_axis_null_field(g, gaussian_u2_generator(0.0));
    CHECK(max_abs(r.f.data) == 0.0);
  }

  SUBCASE("f11 vanishes and the divergence relation holds")
  {
    const NullFieldResult r = one_axis_null_field(g, gaussian_u2_generator());
    CHECK(r.warnings.empty());
    CHECK(max_abs(r.f.component(0).data) == 0.0);
    CHECK(max_abs(r.f.data) > 0.0);
    const ScalarField3 div2 = fourth_order_difference(r.u.component(1), 1);
    const ScalarField3 div3 = fourth_order_difference(r.u.component(2), 2);
    double worst = 0.0, scale = 0.0;
    for (std::size_t v = 0; v < div2.data.size(); ++v) {
      worst = std::max(worst, std::abs(div2.data[v] + div3.data[v]));
      scale = std::max(scale, std::abs(div2.data[v]));
    }
    CHECK(worst < 0.01 * scale);
  }

  SUBCASE("the e1 data are small next to the e3 data")
  {
    const NullFieldResult r = one_axis_null_field(g, gaussian_u2_generator());
    AcquisitionConfig cfg;
    cfg.n_angles = 24;
    const TrtDataSet d = simulate_acquisition(r.f, cfg);
    CHECK(max_slot(d, 0) < 0.02 * max_slot(d, 2));
  }

  SUBCASE("a generator reaching the faces is flagged")
  {
    const NullFieldResult r = one_axis_null_field(g, gaussian_u2_generator(1.0, {0.0, 0.0, 0.0}, 0.6));
    CHECK_FALSE(r.warnings.empty());
  }
}

TEST_CASE("two-axis null field")
{
  const VoxelGrid3 g(32, 1.0);

  SUBCASE("zero seed")
  {
    CHECK(max_abs(two_axis_null_field(SpectralField(g)).data) == 0.0);
  }

  SUBCASE("structure of the default field")
  {
    const SpectralField seed = default_seed(g);
    CHECK(hermitian_defect(seed) < 1e-12);
    const SymTensorField3 f = two_axis_null_field(seed);
    CHECK(max_abs(f.component(0).data) == 0.0);
    CHECK(max_abs(f.component(3).data) == 0.0);
    CHECK(max_abs(f.component(5).data) > 0.0);
    // f33 is the inverse transform of the seed up to the dropped plane bins
    const ScalarField3 f33 = idft3(seed);
    const std::vector<double> got = f.component(5).data;
    double diff = 0.0;
    for (std::size_t v = 0; v < got.size(); ++v)
      diff = std::max(diff, std::abs(got[v] - f33.data[v]));
    CHECK(diff < 1e-3 * max_abs(f33.data));
  }

  SUBCASE("the field sits in the middle of the box")
  {
    const int n = 64;  // the default carrier is well below Nyquist from here on
    const SymTensorField3 f = two_axis_null_field(default_seed(VoxelGrid3(n, 1.0)));
    const ScalarField3 f33 = f.component(5);
    double centre = 0.0, face = 0.0;
    for (int i3 = 0; i3 < n; ++i3)
      for (int i2 = 0; i2 < n; ++i2)
        for (int i1 = 0; i1 < n; ++i1) {
          const double v = std::abs(f33.at(i1, i2, i3));
          if (i1 == 0 || i2 == 0 || i3 == 0)
            face = std::max(face, v);
          centre = std::max(centre, v);
        }
    CHECK(face < 1e-3 * centre);
  }

  SUBCASE("seeds touching the excluded planes are rejected")
  {
    CHECK_THROWS_AS(two_axis_null_field(gaussian_seed(g, {0.0, 20.0, 0.0}, 5.0)), std::invalid_argument);
    SpectralField one_bin(g);
    one_bin.at(0, 3, 1) = 1.0;
    CHECK_THROWS_AS(two_axis_null_field(one_bin), std::invalid_argument);
  }

  SUBCASE("a seed without Hermitian symmetry is rejected")
  {
    SpectralField s(g);
    s.at(3, 4, 2) = cplx{1.0, 0.0};
    CHECK_THROWS_AS(two_axis_null_field(s), std::invalid_argument);
  }

  SUBCASE("e1 and e2 data are small next to the e3 data")
  {
    AcquisitionConfig cfg;
    cfg.n_angles = 24;
    const TrtDataSet d = simulate_acquisition(two_axis_null_field(default_seed(VoxelGrid3(48, 1.0))), cfg);
    CHECK(max_slot(d, 0) < 0.05 * max_slot(d, 2));
    CHECK(max_slot(d, 1) < 0.05 * max_slot(d, 2));
  }
}
