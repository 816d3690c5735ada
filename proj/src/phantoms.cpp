#include "trt/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trt/parallel.hpp"

namespace trt {

double GaussianBump::operator()(const Vec3& x) const
{
  const Vec3 d = x - a;
  return alpha * std::exp(-beta * dot(d, d));
}

Vec3 GaussianBump::gradient(const Vec3& x) const
{
  const Vec3 d = x - a;
  return (-2.0 * beta * (*this)(x)) * d;
}

const std::array<std::vector<GaussianBump>, 6>& smooth_phantom_table()
{
  static const std::array<std::vector<GaussianBump>, 6> table = {{
      {{-1.0, {-0.5, -0.5, -0.5}}, {1.0, {-0.5, 0.5, -0.5}}, {-1.0, {-0.5, 0.5, 0.5}}},  // f11
      {{1.0, {0.5, -0.5, 0.5}}, {-1.0, {0.5, 0.5, -0.5}}},                               // f12
      {{1.0, {-0.5, -0.5, -0.5}}, {-1.0, {-0.5, -0.5, 0.5}}, {1.0, {-0.5, 0.5, 0.5}}},   // f13
      {{-1.0, {0.5, -0.5, -0.5}}, {1.0, {0.5, 0.5, 0.5}}, {-1.0, {0.5, 0.5, 0.5}}},      // f22
      {{1.0, {-0.5, -0.5, 0.5}}, {-1.0, {-0.5, 0.5, -0.5}}},                             // f23
      {{1.0, {0.5, -0.5, -0.5}}, {-1.0, {0.5, -0.5, 0.5}}, {1.0, {0.5, 0.5, 0.5}}},      // f33
  }};
  return table;
}

double smooth_component(int comp, const Vec3& x)
{
  double sum = 0.0;
  for (const GaussianBump& b : smooth_phantom_table().at(static_cast<std::size_t>(comp)))
    sum += b(x);
  return sum;
}

namespace {

template <class Eval>
SymTensorField3 fill_field(const VoxelGrid3& grid, Eval&& eval)
{
  SymTensorField3 f(grid);
  const int n = grid.n();
#pragma omp parallel for schedule(static) num_threads(default_threads())
  for (int i3 = 0; i3 < n; ++i3) {
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i1 = 0; i1 < n; ++i1) {
        const Vec3 x{grid.center(i1), grid.center(i2), grid.center(i3)};
        auto v = f.voxel(grid.index(i1, i2, i3));
        for (int c = 0; c < 6; ++c)
          v[static_cast<std::size_t>(c)] = eval(c, x);
      }
    }
  }
  return f;
}

}  // namespace

SymTensorField3 smooth_phantom(const VoxelGrid3& grid) { return fill_field(grid, smooth_component); }

bool BoxSpec::contains(const Vec3& x) const
{
  for (std::size_t d = 0; d < 3; ++d) {
    if (x[d] < I[d][0] || x[d] > I[d][1])
      return false;
  }
  return true;
}

double BoxSpec::volume() const
{
  double v = 1.0;
  for (const auto& iv : I)
    v *= iv[1] - iv[0];
  return v;
}

const std::array<BoxSpec, 6>& sharp_phantom_table()
{
  static const std::array<BoxSpec, 6> table = {{
      {{{{-0.4, 0.4}, {-0.6, 0.2}, {-0.8, 0.8}}}},  // f11
      {{{{-0.4, 0.4}, {-0.2, 0.6}, {-0.8, 0.8}}}},  // f12
      {{{{-0.8, 0.8}, {-0.4, 0.4}, {-0.6, 0.2}}}},  // f13
      {{{{-0.8, 0.8}, {-0.4, 0.4}, {-0.2, 0.6}}}},  // f22
      {{{{-0.6, 0.2}, {-0.8, 0.8}, {-0.4, 0.4}}}},  // f23
      {{{{-0.2, 0.6}, {-0.8, 0.8}, {-0.4, 0.4}}}},  // f33
  }};
  return table;
}

SymTensorField3 sharp_phantom(const VoxelGrid3& grid)
{
  return fill_field(grid, [](int c, const Vec3& x) {
    return sharp_phantom_table()[static_cast<std::size_t>(c)].contains(x) ? 1.0 : 0.0;
  });
}

Displacement gaussian_displacement(const std::array<GaussianBump, 3>& bumps)
{
  Displacement u;
  u.value = [bumps](const Vec3& x) { return Vec3{bumps[0](x), bumps[1](x), bumps[2](x)}; };
  u.jacobian = [bumps](const Vec3& x) {
    return std::array<Vec3, 3>{bumps[0].gradient(x), bumps[1].gradient(x), bumps[2].gradient(x)};
  };
  return u;
}

Displacement default_displacement()
{
  return gaussian_displacement({{{0.1, {0.1, -0.1, 0.0}, 20.0}, {-0.08, {-0.1, 0.05, 0.1}, 20.0}, {0.06, {0.0, 0.1, -0.1}, 20.0}}});
}

VectorField3 sample_displacement(const VoxelGrid3& grid, const Displacement& u)
{
  VectorField3 out(grid);
  const int n = grid.n();
  for (int i3 = 0; i3 < n; ++i3) {
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i1 = 0; i1 < n; ++i1) {
        const Vec3 v = u.value({grid.center(i1), grid.center(i2), grid.center(i3)});
        for (int c = 0; c < 3; ++c)
          out.at(i1, i2, i3, c) = v[static_cast<std::size_t>(c)];
      }
    }
  }
  return out;
}

SymTensorField3 potential_field(const VoxelGrid3& grid, const Displacement& u)
{
  SymTensorField3 f(grid);
  const int n = grid.n();
  for (int i3 = 0; i3 < n; ++i3) {
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i1 = 0; i1 < n; ++i1) {
        const auto J = u.jacobian({grid.center(i1), grid.center(i2), grid.center(i3)});
        auto v = f.voxel(grid.index(i1, i2, i3));
        for (int i = 0; i < 3; ++i)
          for (int j = i; j < 3; ++j)
            v[static_cast<std::size_t>(SymTensor3::slot(i, j))] = J[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] + J[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      }
    }
  }
  return f;
}

ScalarField3 central_difference(const ScalarField3& f, int axis)
{
  if (axis < 0 || axis > 2)
    throw std::invalid_argument("central_difference: axis must be 0, 1 or 2");
  const int n = f.grid.n();
  const double h = f.grid.voxel_size();
  ScalarField3 out(f.grid);
  for (int i3 = 0; i3 < n; ++i3) {
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i1 = 0; i1 < n; ++i1) {
        int idx[3] = {i1, i2, i3};
        const auto at = [&](int k) {
          int j[3] = {idx[0], idx[1], idx[2]};
          j[axis] = k;
          return f.at(j[0], j[1], j[2]);
        };
        const int i = idx[axis];
        double d;
        if (n < 3)
          d = (at(1) - at(0)) / h;
        else if (i == 0)
          d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
        else if (i == n - 1)
          d = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
        else
          d = (at(i + 1) - at(i - 1)) / (2.0 * h);
        out.at(i1, i2, i3) = d;
      }
    }
  }
  return out;
}

ScalarField3 cumulative_integral(const ScalarField3& f, int axis)
{
  if (axis < 0 || axis > 2)
    throw std::invalid_argument("cumulative_integral: axis must be 0, 1 or 2");
  const int n = f.grid.n();
  const double h = f.grid.voxel_size();
  ScalarField3 out(f.grid);
  for (int q = 0; q < n; ++q) {
    for (int r = 0; r < n; ++r) {
      const auto index = [&](int i) {
        int j[3];
        j[axis] = i;
        j[(axis + 1) % 3] = r;
        j[(axis + 2) % 3] = q;
        return f.grid.index(j[0], j[1], j[2]);
      };
      // integral 0 on the face; the integrand there is extrapolated linearly from the first two centres
      const double face = n > 1 ? 1.5 * f.data[index(0)] - 0.5 * f.data[index(1)] : f.data[index(0)];
      double acc = 0.25 * h * (face + f.data[index(0)]);
      out.data[index(0)] = acc;
      for (int i = 1; i < n; ++i) {
        acc += 0.5 * h * (f.data[index(i - 1)] + f.data[index(i)]);
        out.data[index(i)] = acc;
      }
    }
  }
  return out;
}

SymTensorField3 potential_field(const VectorField3& u)
{
  SymTensorField3 f(u.grid);
  std::array<ScalarField3, 3> comps{u.component(0), u.component(1), u.component(2)};
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      const ScalarField3 a = fourth_order_difference(comps[static_cast<std::size_t>(i)], j);
      const ScalarField3 b = fourth_order_difference(comps[static_cast<std::size_t>(j)], i);
      ScalarField3 s(u.grid);
      for (std::size_t v = 0; v < s.data.size(); ++v)
        s.data[v] = a.data[v] + b.data[v];
      f.set_component(SymTensor3::slot(i, j), s);
    }
  }
  return f;
}

ScalarField3 fourth_order_difference(const ScalarField3& f, int axis)
{
  if (axis < 0 || axis > 2)
    throw std::invalid_argument("fourth_order_difference: axis must be 0, 1 or 2");
  const int n = f.grid.n();
  if (n < 5)
    return central_difference(f, axis);
  const double h = f.grid.voxel_size();
  ScalarField3 out = central_difference(f, axis);
  for (int i3 = 0; i3 < n; ++i3) {
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i1 = 0; i1 < n; ++i1) {
        const int idx[3] = {i1, i2, i3};
        const int i = idx[axis];
        if (i < 2 || i > n - 3)
          continue;
        const auto at = [&](int k) {
          int j[3] = {idx[0], idx[1], idx[2]};
          j[axis] = k;
          return f.at(j[0], j[1], j[2]);
        };
        out.at(i1, i2, i3) = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h);
      }
    }
  }
  return out;
}

U2Generator gaussian_u2_generator(double amplitude, Vec3 centre, double width)
{
  if (!(width > 0.0))
    throw std::invalid_argument("gaussian_u2_generator: width must be positive");
  const double w2 = width * width;
  const auto g = [=](const Vec3& x) {
    const Vec3 d = x - centre;
    return amplitude * std::exp(-dot(d, d) / (2.0 * w2));
  };
  U2Generator gen;
  gen.u2 = [=](const Vec3& x) { return -(x[2] - centre[2]) / w2 * g(x); };
  gen.du2_dx2 = [=](const Vec3& x) { return (x[1] - centre[1]) * (x[2] - centre[2]) / (w2 * w2) * g(x); };
  return gen;
}

namespace {

/// Largest |value| on the boundary faces relative to the largest |value| overall.
double boundary_ratio(const ScalarField3& f)
{
  const int n = f.grid.n();
  double peak = 0.0, edge = 0.0;
  for (int i3 = 0; i3 < n; ++i3) {
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i1 = 0; i1 < n; ++i1) {
        const double v = std::abs(f.at(i1, i2, i3));
        peak = std::max(peak, v);
        const bool face = i1 == 0 || i2 == 0 || i3 == 0 || i1 == n - 1 || i2 == n - 1 || i3 == n - 1;
        if (face)
          edge = std::max(edge, v);
      }
    }
  }
  return peak > 0.0 ? edge / peak : 0.0;
}

}  // namespace

NullFieldResult one_axis_null_field(const VoxelGrid3& grid, const U2Generator& gen)
{
  const int n = grid.n();
  // 5-point Gauss-Legendre rule on [-1, 1]
  static constexpr double node[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                     0.9061798459386640};
  static constexpr double weight[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                       0.2369268850561891};
  ScalarField3 u2(grid), u3(grid);
  for (int i2 = 0; i2 < n; ++i2) {
    for (int i1 = 0; i1 < n; ++i1) {
      // u3 = -int du2/dx2 dx3 from the low face, by quadrature of the generator between centres
      double acc = 0.0;
      double lo = -grid.extent();
      for (int i3 = 0; i3 < n; ++i3) {
        const double hi = grid.center(i3);
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int q = 0; q < 5; ++q)
          acc -= weight[q] * half * gen.du2_dx2({grid.center(i1), grid.center(i2), mid + half * node[q]});
        lo = hi;
        u2.at(i1, i2, i3) = gen.u2({grid.center(i1), grid.center(i2), hi});
        u3.at(i1, i2, i3) = acc;
      }
    }
  }

  VectorField3 u(grid);
  u.set_component(1, u2);
  u.set_component(2, u3);
  // u1 = 0, so f11 comes out of the stencil as an exact zero
  NullFieldResult out{potential_field(u), u, {}};

  // boundary truncation well below the 1e-3 level at which the e1 data should vanish
  constexpr double kDecay = 1e-4;
  if (boundary_ratio(u2) > kDecay)
    out.warnings.push_back("one_axis_null_field: u2 does not decay at the grid boundary");
  if (boundary_ratio(u3) > kDecay)
    out.warnings.push_back("one_axis_null_field: u3 does not decay at the grid boundary; the integration constant is ambiguous");
  return out;
}

SpectralField gaussian_seed(const VoxelGrid3& grid, const Vec3& y0, double width, double amplitude)
{
  if (!(width > 0.0))
    throw std::invalid_argument("gaussian_seed: width must be positive");
  SpectralField s(grid);
  const int n = grid.n();
  const double w2 = 2.0 * width * width;
  const double c = 0.5 * (n - 1) * grid.voxel_size();
  for (int k3 = 0; k3 < n; ++k3) {
    for (int k2 = 0; k2 < n; ++k2) {
      for (int k1 = 0; k1 < n; ++k1) {
        if (is_nyquist(k1, n) || is_nyquist(k2, n) || is_nyquist(k3, n))
          continue;  // no mirror bin, so a nonzero value would not be Hermitian
        const Vec3 y = s.frequency(k1, k2, k3);
        const Vec3 dm = y - y0;
        const Vec3 dp = y + y0;
        const double g = amplitude * (std::exp(-dot(dm, dm) / w2) + std::exp(-dot(dp, dp) / w2));
        s.at(k1, k2, k3) = std::polar(g, -(y[0] + y[1] + y[2]) * c);  // centres the field in the box
      }
    }
  }
  return s;
}

SpectralField default_seed(const VoxelGrid3& grid)
{
  // 1.5 fundamental bins wide, carrier 4 widths from the planes y1 = 0 and y2 = 0 (seed there
  // about 3e-4 of its peak). A fixed physical size keeps voxel aliasing falling as n grows.
  const double width = 1.5 * 2.0 * kPi / grid.extent();
  const double k0 = 4.0 * width;
  return gaussian_seed(grid, {k0, k0, 0.0}, width);
}

SymTensorField3 two_axis_null_field(const SpectralField& g)
{
  const VoxelGrid3& grid = g.grid;
  const int n = grid.n();
  double peak = 0.0, on_planes = 0.0;
  for (int k3 = 0; k3 < n; ++k3) {
    for (int k2 = 0; k2 < n; ++k2) {
      for (int k1 = 0; k1 < n; ++k1) {
        const double a = std::abs(g.at(k1, k2, k3));
        peak = std::max(peak, a);
        if (k1 == 0 || k2 == 0)
          on_planes = std::max(on_planes, a);
      }
    }
  }
  if (peak > 0.0 && on_planes > 1e-3 * peak)
    throw std::invalid_argument("two_axis_null_field: seed spectrum reaches the planes y1 = 0 or y2 = 0 (ratio " +
                                std::to_string(on_planes / peak) + ")");

  SymTensorField3 f(grid);
  if (peak == 0.0)
    return f;
  std::array<SpectralField, 4> comps{SpectralField(grid), SpectralField(grid), SpectralField(grid), SpectralField(grid)};
  for (int k3 = 0; k3 < n; ++k3) {
    for (int k2 = 0; k2 < n; ++k2) {
      for (int k1 = 0; k1 < n; ++k1) {
        if (k1 == 0 || k2 == 0)
          continue;
        const Vec3 y = g.frequency(k1, k2, k3);
        const cplx v = g.at(k1, k2, k3);
        comps[0].at(k1, k2, k3) = y[2] * y[2] / (2.0 * y[0] * y[1]) * v;  // f12
        comps[1].at(k1, k2, k3) = -y[2] / (2.0 * y[0]) * v;               // f13
        comps[2].at(k1, k2, k3) = -y[2] / (2.0 * y[1]) * v;               // f23
        comps[3].at(k1, k2, k3) = v;                                      // f33
      }
    }
  }
  const int slots[4] = {1, 2, 4, 5};
  double field_norm = 0.0, worst_imag = 0.0;
  for (int c = 0; c < 4; ++c) {
    double imag = 0.0;
    const ScalarField3 x = idft3(comps[static_cast<std::size_t>(c)], &imag);
    for (double v : x.data)
      field_norm = std::max(field_norm, std::abs(v));
    worst_imag = std::max(worst_imag, imag);
    f.set_component(slots[c], x);
  }
  if (worst_imag > 1e-10 * std::max(field_norm, 1e-300))
    throw std::invalid_argument("two_axis_null_field: seed is not Hermitian symmetric (imaginary residue " +
                                std::to_string(worst_imag) + ")");
  return f;
}

}  // namespace trt
