#include "trt/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "trt/backprojection.hpp"
#include "trt/phantoms.hpp"

namespace trt {

int padded_size(int n, int pad_factor)
{
  if (pad_factor < 1)
    throw std::invalid_argument("padded_size: pad factor must be >= 1");
  const int extra = n * (pad_factor - 1);
  return n + extra + (extra % 2);  // centred padding needs an even surplus
}

namespace {

int require_slot(const TrtDataSet& data, int axis)
{
  if (axis < 0 || axis > 2)
    throw std::invalid_argument("axis must be 0, 1 or 2");
  const int slot = data.slot_of(axis);
  if (slot < 0)
    throw std::invalid_argument("data set has no acquisition about axis e" + std::to_string(axis + 1));
  return slot;
}

SinogramGeometry geometry_of(const TrtDataSet& data) { return {data.n_angles, data.cols, data.pitch}; }

VoxelGrid3 padded_grid(const TrtDataSet& data, int pad_factor)
{
  const int p = padded_size(data.rows, pad_factor);
  return VoxelGrid3(p, 0.5 * p * data.pitch);
}

}  // namespace

ScalarField3 recover_diagonal_fbp(const TrtDataSet& data, int axis, Exec exec)
{
  const int slot = require_slot(data, axis);
  const std::vector<double> block = data.component_block(slot, kAxial);
  return fbp_axis(block, data.rows, geometry_of(data), axis, data.reconstruction_grid(), exec);
}

std::array<ScalarField3, 3> recover_diagonals_fbp(const TrtDataSet& data, Exec exec)
{
  for (int k = 0; k < 3; ++k)
    require_slot(data, k);
  return {recover_diagonal_fbp(data, 0, exec), recover_diagonal_fbp(data, 1, exec), recover_diagonal_fbp(data, 2, exec)};
}

SpectralField assemble_lambda(const TrtDataSet& data, int axis, const ReconstructOptions& opts)
{
  const int slot = require_slot(data, axis);
  const std::vector<double> block = data.component_block(slot, kJ1);
  const std::vector<double> deriv = hamming_derivative(block, data.cols, data.pitch);
  const ScalarField3 b = backproject_axis(deriv, data.rows, geometry_of(data), axis, padded_grid(data, opts.pad_factor), opts.exec,
                                          opts.kernel);
  SpectralField s = ramp_multiplier(dft3(b), axis, 1);
  const cplx factor{0.0, -0.5};
  for (cplx& v : s.data)
    v *= factor;
  return s;
}

SpectralField assemble_mu(const TrtDataSet& data, int axis, const ReconstructOptions& opts)
{
  const int slot = require_slot(data, axis);
  const std::vector<double> block = data.component_block(slot, kJ2);
  // Ramp filtering along p before back-projection; the unfiltered back-projection has a 1/r
  // tail that the padded box truncates, and the |Pi y|^3 multiplier amplifies that error.
  const ScalarField3 b =
      fbp_axis(block, data.rows, geometry_of(data), axis, padded_grid(data, opts.pad_factor), opts.exec, opts.kernel);
  return ramp_multiplier(dft3(b), axis, 2);
}

std::array<std::array<double, 3>, 3> lambda_matrix(const Vec3& y)
{
  return {{{y[1], y[2], 0.0}, {y[0], 0.0, y[2]}, {0.0, y[0], y[1]}}};
}

std::array<std::array<double, 3>, 3> nu_matrix(const Vec3& y)
{
  const double a = y[0] * y[0], b = y[1] * y[1], c = y[2] * y[2];
  return {{{0.0, b, c}, {a, 0.0, c}, {a, b, 0.0}}};
}

namespace {

using Mat3 = Eigen::Matrix3d;
using CVec3 = Eigen::Vector3cd;

Mat3 to_eigen(const std::array<std::array<double, 3>, 3>& m)
{
  Mat3 e;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      e(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return e;
}

CVec3 to_eigen(const std::array<cplx, 3>& v) { return CVec3(v[0], v[1], v[2]); }
std::array<cplx, 3> from_eigen(const CVec3& v) { return {v(0), v(1), v(2)}; }

/// Minimum-norm least-squares solution and an orthonormal basis of the null space.
struct MinNormSolve {
  CVec3 x;
  Eigen::MatrixXd null_basis;  // 3 x k
};

MinNormSolve min_norm(const Mat3& m, const CVec3& rhs)
{
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d s = svd.singularValues();
  const double thr = 1e-12 * std::max(s(0), 1e-300);
  CVec3 x = CVec3::Zero();
  int rank = 0;
  for (int i = 0; i < 3; ++i) {
    if (s(i) > thr && s(0) > 0.0) {
      const cplx coef = svd.matrixU().col(i).cast<cplx>().dot(rhs) / s(i);
      x += coef * svd.matrixV().col(i).cast<cplx>();
      ++rank;
    }
  }
  return {x, svd.matrixV().rightCols(3 - rank)};
}

bool is_singular(const Vec3& y, double tau)
{
  return std::abs(y[0]) <= tau || std::abs(y[1]) <= tau || std::abs(y[2]) <= tau;
}

std::array<cplx, 3> closed_form_offdiagonals(const Vec3& y, const std::array<cplx, 3>& l)
{
  const double y1 = y[0], y2 = y[1], y3 = y[2];
  return {l[0] / (2.0 * y2) + l[1] / (2.0 * y1) - l[2] * (y3 / (2.0 * y1 * y2)),
          l[0] / (2.0 * y3) + l[2] / (2.0 * y1) - l[1] * (y2 / (2.0 * y1 * y3)),
          l[1] / (2.0 * y3) + l[2] / (2.0 * y2) - l[0] * (y1 / (2.0 * y2 * y3))};
}

std::array<cplx, 3> closed_form_diagonals(const Vec3& y, const std::array<cplx, 3>& l, const std::array<cplx, 3>& m)
{
  const double y1 = y[0], y2 = y[1], y3 = y[2];
  return {(m[1] + m[2] - m[0] + y2 * l[1] + y3 * l[2] - 3.0 * y1 * l[0]) / (2.0 * y1 * y1),
          (m[2] + m[0] - m[1] + y3 * l[2] + y1 * l[0] - 3.0 * y2 * l[1]) / (2.0 * y2 * y2),
          (m[0] + m[1] - m[2] + y1 * l[0] + y2 * l[1] - 3.0 * y3 * l[2]) / (2.0 * y3 * y3)};
}

}  // namespace

std::array<cplx, 3> solve_offdiagonals_bin(const Vec3& y, const std::array<cplx, 3>& lambda, double tau)
{
  if (!is_singular(y, tau))
    return closed_form_offdiagonals(y, lambda);
  return from_eigen(min_norm(to_eigen(lambda_matrix(y)), to_eigen(lambda)).x);
}

std::array<cplx, 3> nu_from_mu(const Vec3& y, const std::array<cplx, 3>& mu, const std::array<cplx, 3>& off)
{
  return {mu[0] - 2.0 * y[1] * y[2] * off[2], mu[1] - 2.0 * y[0] * y[2] * off[1], mu[2] - 2.0 * y[0] * y[1] * off[0]};
}

std::array<cplx, 3> recover_diagonals_bin(const Vec3& y, const std::array<cplx, 3>& lambda, const std::array<cplx, 3>& mu,
                                          double tau)
{
  if (!is_singular(y, tau))
    return closed_form_diagonals(y, lambda, mu);
  const std::array<cplx, 3> off = solve_offdiagonals_bin(y, lambda, tau);
  return from_eigen(min_norm(to_eigen(nu_matrix(y)), to_eigen(nu_from_mu(y, mu, off))).x);
}

namespace {

void check_common_lattice(const std::array<const SpectralField*, 6>& fields)
{
  for (const SpectralField* f : fields) {
    if (f && !(f->grid == fields[0]->grid))
      throw std::invalid_argument("spectral inputs live on different lattices");
  }
}

/// Solves a per-bin 3x3 system over the whole lattice. `closed` handles nonsingular bins;
/// `system` returns (matrix, rhs) for singular ones.
/// Lagrange weights for extrapolating to offset 0 from offsets +1..+m, -1..-m.
struct Stencil {
  std::vector<int> offset;
  std::vector<double> weight;
};

Stencil lagrange_stencil(int m)
{
  Stencil st;
  for (int j = 1; j <= m; ++j) {
    st.offset.push_back(j);
    st.offset.push_back(-j);
  }
  for (std::size_t j = 0; j < st.offset.size(); ++j) {
    double w = 1.0;
    for (std::size_t i = 0; i < st.offset.size(); ++i) {
      if (i != j)
        w *= -st.offset[i] / static_cast<double>(st.offset[j] - st.offset[i]);
    }
    st.weight.push_back(w);
  }
  return st;
}

/// Value at bin k predicted from its neighbours along axis d. The lattice origin sits at
/// voxel (n - 1) / 2, so the linear phase it adds along d is removed before extrapolating.
cplx extrapolate_along(const SpectralField& s, const int k[3], int d, const Stencil& st)
{
  const int n = s.grid.n();
  cplx acc = 0.0;
  for (std::size_t j = 0; j < st.offset.size(); ++j) {
    int q[3] = {k[0], k[1], k[2]};
    q[d] = ((q[d] + st.offset[j]) % n + n) % n;
    const double shift = 2.0 * kPi * st.offset[j] * (n - 1) / (2.0 * n);
    acc += st.weight[j] * std::polar(1.0, shift) * s.at(q[0], q[1], q[2]);
  }
  return acc;
}

template <class Closed, class System>
std::array<SpectralField, 3> lattice_solve(const VoxelGrid3& grid, const ReconstructOptions& opts, Closed&& closed,
                                           System&& system)
{
  std::array<SpectralField, 3> out{SpectralField(grid), SpectralField(grid), SpectralField(grid)};
  const SpectralField& ref = out[0];
  const int n = grid.n();
  const double tau = opts.tau_rel * ref.nyquist();

  struct Pending {
    int k[3];
    int zeros;
  };
  std::vector<Pending> singular;

  for (int k3 = 0; k3 < n; ++k3) {
    for (int k2 = 0; k2 < n; ++k2) {
      for (int k1 = 0; k1 < n; ++k1) {
        if (is_nyquist(k1, n) || is_nyquist(k2, n) || is_nyquist(k3, n))
          continue;  // no real counterpart; left at zero
        const Vec3 y = ref.frequency(k1, k2, k3);
        const int zeros = (std::abs(y[0]) <= tau) + (std::abs(y[1]) <= tau) + (std::abs(y[2]) <= tau);
        if (zeros > 0) {
          singular.push_back({{k1, k2, k3}, zeros});
          continue;
        }
        const std::array<cplx, 3> x = closed(k1, k2, k3, y);
        for (std::size_t c = 0; c < 3; ++c)
          out[c].at(k1, k2, k3) = x[c];
      }
    }
  }

  std::stable_sort(singular.begin(), singular.end(), [](const Pending& a, const Pending& b) { return a.zeros < b.zeros; });
  for (const Pending& p : singular) {
    const Vec3 y = ref.frequency(p.k[0], p.k[1], p.k[2]);
    const auto [m, rhs] = system(p.k[0], p.k[1], p.k[2], y);
    MinNormSolve sol = min_norm(to_eigen(m), to_eigen(rhs));
    if (opts.singular == SingularPolicy::NeighborNullspace && sol.null_basis.cols() > 0) {
      // Extrapolation from the solved bins on either side of each vanishing coordinate,
      // averaged over those coordinates.
      const Stencil st = lagrange_stencil(std::max(1, std::min(opts.interp_half_width, (n - 2) / 2)));
      CVec3 mean = CVec3::Zero();
      int count = 0;
      for (int d = 0; d < 3; ++d) {
        if (std::abs(y[static_cast<std::size_t>(d)]) > tau)
          continue;
        for (std::size_t c = 0; c < 3; ++c)
          mean(static_cast<Eigen::Index>(c)) += extrapolate_along(out[c], p.k, d, st);
        ++count;
      }
      mean /= static_cast<double>(count);
      const Eigen::MatrixXcd nb = sol.null_basis.cast<cplx>();
      sol.x += nb * (nb.adjoint() * mean);
    }
    for (std::size_t c = 0; c < 3; ++c)
      out[c].at(p.k[0], p.k[1], p.k[2]) = sol.x(static_cast<Eigen::Index>(c));
  }
  return out;
}

std::array<cplx, 3> gather(const std::array<SpectralField, 3>& s, int k1, int k2, int k3)
{
  return {s[0].at(k1, k2, k3), s[1].at(k1, k2, k3), s[2].at(k1, k2, k3)};
}

}  // namespace

OffDiagonalSpectra solve_offdiagonals(const LambdaTriple& lambda, const ReconstructOptions& opts)
{
  check_common_lattice({&lambda.l[0], &lambda.l[1], &lambda.l[2], nullptr, nullptr, nullptr});
  return lattice_solve(
      lambda.l[0].grid, opts,
      [&](int k1, int k2, int k3, const Vec3& y) { return closed_form_offdiagonals(y, gather(lambda.l, k1, k2, k3)); },
      [&](int k1, int k2, int k3, const Vec3& y) { return std::pair{lambda_matrix(y), gather(lambda.l, k1, k2, k3)}; });
}

DiagonalSpectra recover_diagonals_alternative(const LambdaTriple& lambda, const MuTriple& mu, const ReconstructOptions& opts)
{
  check_common_lattice({&lambda.l[0], &lambda.l[1], &lambda.l[2], &mu.m[0], &mu.m[1], &mu.m[2]});
  const OffDiagonalSpectra off = solve_offdiagonals(lambda, opts);
  return lattice_solve(
      lambda.l[0].grid, opts,
      [&](int k1, int k2, int k3, const Vec3& y) {
        return closed_form_diagonals(y, gather(lambda.l, k1, k2, k3), gather(mu.m, k1, k2, k3));
      },
      [&](int k1, int k2, int k3, const Vec3& y) {
        return std::pair{nu_matrix(y), nu_from_mu(y, gather(mu.m, k1, k2, k3), gather(off, k1, k2, k3))};
      });
}

ScalarField3 spectrum_to_field(const SpectralField& s, int n, double* imag_ratio)
{
  double imag = 0.0;
  const ScalarField3 big = idft3(s, &imag);
  if (imag_ratio) {
    double peak = 0.0;
    for (double v : big.data)
      peak = std::max(peak, std::abs(v));
    *imag_ratio = peak > 0.0 ? imag / peak : 0.0;
  }
  return crop_centered(big, n);
}

namespace {

LambdaTriple lambda_triple(const TrtDataSet& data, const ReconstructOptions& opts)
{
  return {{assemble_lambda(data, 0, opts), assemble_lambda(data, 1, opts), assemble_lambda(data, 2, opts)}};
}

MuTriple mu_triple(const TrtDataSet& data, const ReconstructOptions& opts)
{
  return {{assemble_mu(data, 0, opts), assemble_mu(data, 1, opts), assemble_mu(data, 2, opts)}};
}

}  // namespace

ThreeAxisResult reconstruct_three_axis_report(const TrtDataSet& data, const ReconstructOptions& opts)
{
  for (int k = 0; k < 3; ++k)
    require_slot(data, k);
  const VoxelGrid3 grid = data.reconstruction_grid();
  ThreeAxisResult r{SymTensorField3(grid), 0.0};

  const std::array<ScalarField3, 3> diag = recover_diagonals_fbp(data, opts.exec);
  r.f.set_component(0, diag[0]);
  r.f.set_component(3, diag[1]);
  r.f.set_component(5, diag[2]);

  const OffDiagonalSpectra off = solve_offdiagonals(lambda_triple(data, opts), opts);
  const int slots[3] = {1, 2, 4};
  for (std::size_t c = 0; c < 3; ++c) {
    double ratio = 0.0;
    r.f.set_component(slots[c], spectrum_to_field(off[c], grid.n(), &ratio));
    r.imag_ratio = std::max(r.imag_ratio, ratio);
  }
  return r;
}

SymTensorField3 reconstruct_three_axis(const TrtDataSet& data, const ReconstructOptions& opts)
{
  return reconstruct_three_axis_report(data, opts).f;
}

std::array<ScalarField3, 3> reconstruct_diagonals_alternative(const TrtDataSet& data, const ReconstructOptions& opts)
{
  const int n = data.rows;
  const DiagonalSpectra d = recover_diagonals_alternative(lambda_triple(data, opts), mu_triple(data, opts), opts);
  return {spectrum_to_field(d[0], n), spectrum_to_field(d[1], n), spectrum_to_field(d[2], n)};
}

TwoAxisResult reconstruct_two_axis_potential(const TrtDataSet& data, const ReconstructOptions& opts)
{
  require_slot(data, 0);
  require_slot(data, 1);
  const VoxelGrid3 grid = data.reconstruction_grid();
  const int n = grid.n();
  TwoAxisResult r{VectorField3(grid), SymTensorField3(grid), {}};
  if (data.slot_of(2) >= 0)
    r.warnings.push_back("two-axis reconstruction ignores the data about e3");

  const ScalarField3 f11 = recover_diagonal_fbp(data, 0, opts.exec);
  const ScalarField3 f22 = recover_diagonal_fbp(data, 1, opts.exec);

  // f11 = 2 du1/dx1, f22 = 2 du2/dx2
  ScalarField3 u1 = cumulative_integral(f11, 0);
  ScalarField3 u2 = cumulative_integral(f22, 1);
  for (double& v : u1.data)
    v *= 0.5;
  for (double& v : u2.data)
    v *= 0.5;

  ScalarField3 f12 = central_difference(u1, 1);
  {
    const ScalarField3 d = central_difference(u2, 0);
    for (std::size_t v = 0; v < f12.data.size(); ++v)
      f12.data[v] += d.data[v];
  }

  // lambda1 = y2 f12^ + y3 f13^
  const SpectralField lambda1 = assemble_lambda(data, 0, opts);
  const VoxelGrid3& big = lambda1.grid;
  const int p = big.n();
  const SpectralField f12_hat = dft3(pad_centered(f12, p));
  SpectralField f13_hat(big);
  const double tau = opts.tau_rel * f13_hat.nyquist();
  for (int k3 = 0; k3 < p; ++k3) {
    for (int k2 = 0; k2 < p; ++k2) {
      for (int k1 = 0; k1 < p; ++k1) {
        if (is_nyquist(k1, p) || is_nyquist(k2, p) || is_nyquist(k3, p))
          continue;
        const Vec3 y = f13_hat.frequency(k1, k2, k3);
        if (std::abs(y[2]) <= tau)
          continue;
        f13_hat.at(k1, k2, k3) = (lambda1.at(k1, k2, k3) - y[1] * f12_hat.at(k1, k2, k3)) / y[2];
      }
    }
  }
  // y3 = 0 carries no information on f13: extrapolate from the planes on either side
  const Stencil st = lagrange_stencil(std::max(1, std::min(opts.interp_half_width, (p - 2) / 2)));
  for (int k2 = 0; k2 < p; ++k2) {
    for (int k1 = 0; k1 < p; ++k1) {
      if (is_nyquist(k1, p) || is_nyquist(k2, p))
        continue;
      const int k[3] = {k1, k2, 0};
      f13_hat.at(k1, k2, 0) = extrapolate_along(f13_hat, k, 2, st);
    }
  }
  double imag = 0.0;
  const ScalarField3 f13 = spectrum_to_field(f13_hat, n, &imag);
  if (imag > 1e-6)
    r.warnings.push_back("f13 inverse transform left an imaginary residue of " + std::to_string(imag));

  // du3/dx1 = f13 - du1/dx3
  ScalarField3 g = central_difference(u1, 2);
  for (std::size_t v = 0; v < g.data.size(); ++v)
    g.data[v] = f13.data[v] - g.data[v];
  const ScalarField3 u3 = cumulative_integral(g, 0);

  ScalarField3 f33 = central_difference(u3, 2);
  for (double& v : f33.data)
    v *= 2.0;
  ScalarField3 f23 = central_difference(u2, 2);
  {
    const ScalarField3 d = central_difference(u3, 1);
    for (std::size_t v = 0; v < f23.data.size(); ++v)
      f23.data[v] += d.data[v];
  }

  r.u.set_component(0, u1);
  r.u.set_component(1, u2);
  r.u.set_component(2, u3);
  r.f.set_component(0, f11);
  r.f.set_component(1, f12);
  r.f.set_component(2, f13);
  r.f.set_component(3, f22);
  r.f.set_component(4, f23);
  r.f.set_component(5, f33);

  // The integration constants assume decay; flag displacement left at the far faces.
  const auto far_face_ratio = [n](const ScalarField3& u, int axis) {
    double peak = 0.0, face = 0.0;
    for (int i3 = 0; i3 < n; ++i3)
      for (int i2 = 0; i2 < n; ++i2)
        for (int i1 = 0; i1 < n; ++i1) {
          const double v = std::abs(u.at(i1, i2, i3));
          peak = std::max(peak, v);
          const int idx[3] = {i1, i2, i3};
          if (idx[axis] == n - 1)
            face = std::max(face, v);
        }
    return peak > 0.0 ? face / peak : 0.0;
  };
  const char* names[3] = {"u1", "u2", "u3"};
  const ScalarField3* us[3] = {&u1, &u2, &u3};
  const int along[3] = {0, 1, 0};
  for (int i = 0; i < 3; ++i) {
    const double ratio = far_face_ratio(*us[i], along[i]);
    if (ratio > 0.05)
      r.warnings.push_back(std::string(names[i]) + " does not decay at the far face (ratio " + std::to_string(ratio) + ")");
  }
  return r;
}

ScalarField3 low_pass(const ScalarField3& f, double fraction)
{
  SpectralField s = dft3(f);
  const int n = f.grid.n();
  const double limit = fraction * n / 2.0;
  for (int k3 = 0; k3 < n; ++k3)
    for (int k2 = 0; k2 < n; ++k2)
      for (int k1 = 0; k1 < n; ++k1) {
        if (std::abs(signed_frequency(k1, n)) >= limit || std::abs(signed_frequency(k2, n)) >= limit ||
            std::abs(signed_frequency(k3, n)) >= limit)
          s.at(k1, k2, k3) = 0.0;
      }
  return idft3(s);
}

namespace {

double l2(const std::vector<double>& v)
{
  double s = 0.0;
  for (double x : v)
    s += x * x;
  return std::sqrt(s);
}

double l2_diff(const std::vector<double>& a, const std::vector<double>& b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

void check_same_grid(const ScalarField3& a, const ScalarField3& b)
{
  if (!(a.grid == b.grid))
    throw std::invalid_argument("fields live on different grids");
}

}  // namespace

double relative_l2(const ScalarField3& a, const ScalarField3& b)
{
  check_same_grid(a, b);
  const double ref = l2(b.data);
  const double diff = l2_diff(a.data, b.data);
  return ref > 0.0 ? diff / ref : diff;
}

double band_limited_relative_l2(const ScalarField3& a, const ScalarField3& b, double fraction)
{
  check_same_grid(a, b);
  return relative_l2(low_pass(a, fraction), low_pass(b, fraction));
}

ConsistencyReport consistency_residual(const std::array<ScalarField3, 3>& a, const std::array<ScalarField3, 3>& b,
                                       double fraction)
{
  ConsistencyReport r;
  double num = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    check_same_grid(a[c], b[c]);
    const ScalarField3 la = low_pass(a[c], fraction);
    const ScalarField3 lb = low_pass(b[c], fraction);
    const double d = l2_diff(la.data, lb.data);
    const double ra = l2(la.data), rb = l2(lb.data);
    const double ref = std::max(ra, rb);
    r.component[c] = ref > 0.0 ? d / ref : 0.0;
    num += d * d;
    na += ra * ra;
    nb += rb * rb;
  }
  const double ref = std::sqrt(std::max(na, nb));
  r.aggregate = ref > 0.0 ? std::sqrt(num) / ref : 0.0;
  return r;
}

}  // namespace trt
