#include "trt/backprojection.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "trt/spectral.hpp"

namespace trt {

namespace {

void check_geometry(const SinogramGeometry& g, std::size_t sino_size)
{
  if (g.n_angles < 1 || g.cols < 1 || !(g.pitch > 0.0))
    throw std::invalid_argument("sinogram geometry must have positive angles, columns and pitch");
  if (sino_size != static_cast<std::size_t>(g.n_angles) * g.cols)
    throw std::invalid_argument("sinogram size " + std::to_string(sino_size) + " does not match " +
                                std::to_string(g.n_angles) + " angles x " + std::to_string(g.cols) + " columns");
}

void check_plane(const VoxelGrid3& grid, int axis, int s_index)
{
  if (axis < 0 || axis > 2)
    throw std::invalid_argument("axis must be 0, 1 or 2");
  if (s_index < 0 || s_index >= grid.n())
    throw std::invalid_argument("plane index out of range");
}

/// In-plane pixel (u, v) of a voxel index.
std::array<int, 2> pixel_of(std::size_t vox, int n, int axis)
{
  const std::size_t nn = static_cast<std::size_t>(n);
  const int i[3] = {static_cast<int>(vox % nn), static_cast<int>((vox / nn) % nn), static_cast<int>(vox / (nn * nn))};
  const auto [a, b] = AxisFrame::plane_axes(axis);
  return {i[a], i[b]};
}

}  // namespace

std::vector<double> backproject_plane(std::span<const double> sino, const SinogramGeometry& geom, const VoxelGrid3& grid,
                                      int axis, int s_index, BackprojectKernel kernel)
{
  check_geometry(geom, sino.size());
  check_plane(grid, axis, s_index);
  const int n = grid.n();
  std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);

  if (kernel != BackprojectKernel::RayTranspose) {
    const bool cubic = kernel == BackprojectKernel::Cubic;
    const double c0 = 0.5 * (geom.cols - 1);
    for (int j = 0; j < geom.n_angles; ++j) {
      const AxisFrame frame(axis, geom.angle(j));
      const auto [a, b] = AxisFrame::plane_axes(axis);
      const double za = frame.zeta[static_cast<std::size_t>(a)];
      const double zb = frame.zeta[static_cast<std::size_t>(b)];
      const double* row = sino.data() + static_cast<std::size_t>(j) * geom.cols;
      for (int v = 0; v < n; ++v) {
        const double xb = grid.center(v);
        for (int u = 0; u < n; ++u) {
          const double p = grid.center(u) * za + xb * zb;
          const double c = p / geom.pitch + c0;
          const double cf = std::floor(c);
          const int i0 = static_cast<int>(cf);
          const double t = c - cf;
          double val = 0.0;
          if (cubic) {
            // Keys cubic convolution, a = -1/2
            const double w4[4] = {((-0.5 * t + 1.0) * t - 0.5) * t, (1.5 * t - 2.5) * t * t + 1.0,
                                  ((-1.5 * t + 2.0) * t + 0.5) * t, (0.5 * t - 0.5) * t * t};
            for (int q = 0; q < 4; ++q) {
              const int iq = i0 - 1 + q;
              if (iq >= 0 && iq < geom.cols)
                val += w4[q] * row[iq];
            }
          } else {
            if (i0 >= 0 && i0 < geom.cols)
              val += (1.0 - t) * row[i0];
            if (i0 + 1 >= 0 && i0 + 1 < geom.cols)
              val += t * row[i0 + 1];
          }
          out[static_cast<std::size_t>(u) + static_cast<std::size_t>(n) * v] += val;
        }
      }
    }
    const double inv = 1.0 / geom.n_angles;
    for (double& x : out)
      x *= inv;
    return out;
  }

  const double h = grid.voxel_size();
  const double scale = geom.pitch / (h * h * geom.n_angles);
  const double s = grid.center(s_index);
  for (int j = 0; j < geom.n_angles; ++j) {
    const AxisFrame frame(axis, geom.angle(j));
    for (int c = 0; c < geom.cols; ++c) {
      const double val = sino[static_cast<std::size_t>(j) * geom.cols + c] * scale;
      if (val == 0.0)
        continue;
      visit_ray(grid, frame.ray(s, geom.col_coord(c)), [&](std::size_t vox, double w) {
        const auto [u, v] = pixel_of(vox, n, axis);
        out[static_cast<std::size_t>(u) + static_cast<std::size_t>(n) * v] += w * val;
      });
    }
  }
  return out;
}

std::vector<double> project_plane(std::span<const double> image, const SinogramGeometry& geom, const VoxelGrid3& grid,
                                  int axis, int s_index)
{
  check_plane(grid, axis, s_index);
  const int n = grid.n();
  if (image.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("project_plane: image size does not match the grid");
  std::vector<double> sino(static_cast<std::size_t>(geom.n_angles) * geom.cols, 0.0);
  check_geometry(geom, sino.size());
  const double s = grid.center(s_index);
  for (int j = 0; j < geom.n_angles; ++j) {
    const AxisFrame frame(axis, geom.angle(j));
    for (int c = 0; c < geom.cols; ++c) {
      double sum = 0.0;
      visit_ray(grid, frame.ray(s, geom.col_coord(c)), [&](std::size_t vox, double w) {
        const auto [u, v] = pixel_of(vox, n, axis);
        sum += w * image[static_cast<std::size_t>(u) + static_cast<std::size_t>(n) * v];
      });
      sino[static_cast<std::size_t>(j) * geom.cols + c] = sum;
    }
  }
  return sino;
}

namespace {

/// Detector row feeding each grid plane, or -1.
std::vector<int> plane_rows(const VoxelGrid3& grid, int rows, double pitch)
{
  const double h = grid.voxel_size();
  if (std::abs(pitch - h) > 1e-9 * h)
    throw std::invalid_argument("backproject_axis: detector pitch " + std::to_string(pitch) +
                                " differs from the voxel size " + std::to_string(h));
  // plane i sits at (i - (n-1)/2) h, row r at (r - (rows-1)/2) h
  const int n = grid.n();
  if ((n - rows) % 2 != 0)
    throw std::invalid_argument("backproject_axis: detector rows and grid planes are offset by half a voxel");
  const int off = (n - rows) / 2;
  std::vector<int> map(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const int r = i - off;
    if (r >= 0 && r < rows)
      map[static_cast<std::size_t>(i)] = r;
  }
  return map;
}

void check_block(std::span<const double> block, int rows, const SinogramGeometry& geom)
{
  if (rows < 1)
    throw std::invalid_argument("backproject_axis: rows must be >= 1");
  const std::size_t expect = static_cast<std::size_t>(geom.n_angles) * rows * geom.cols;
  if (block.size() != expect)
    throw std::invalid_argument("backproject_axis: block has " + std::to_string(block.size()) + " values, expected " +
                                std::to_string(expect));
}

std::vector<double> gather_row(std::span<const double> block, int rows, const SinogramGeometry& geom, int r)
{
  std::vector<double> sino(static_cast<std::size_t>(geom.n_angles) * geom.cols);
  for (int j = 0; j < geom.n_angles; ++j) {
    const double* src = block.data() + (static_cast<std::size_t>(j) * rows + r) * geom.cols;
    std::copy(src, src + geom.cols, sino.begin() + static_cast<std::ptrdiff_t>(j) * geom.cols);
  }
  return sino;
}

void scatter_plane(ScalarField3& f, int axis, int i, const std::vector<double>& img)
{
  const int n = f.grid.n();
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u) {
      const auto idx = slab_voxel(axis, i, u, v);
      f.at(idx[0], idx[1], idx[2]) = img[static_cast<std::size_t>(u) + static_cast<std::size_t>(n) * v];
    }
  }
}

void backproject_one(std::span<const double> block, int rows, const SinogramGeometry& geom, int axis,
                     const std::vector<int>& map, int i, ScalarField3& out, BackprojectKernel kernel)
{
  const int r = map[static_cast<std::size_t>(i)];
  if (r < 0)
    return;
  const std::vector<double> sino = gather_row(block, rows, geom, r);
  scatter_plane(out, axis, i, backproject_plane(sino, geom, out.grid, axis, i, kernel));
}

}  // namespace

ScalarField3 backproject_axis(std::span<const double> block, int rows, const SinogramGeometry& geom, int axis,
                              const VoxelGrid3& grid, Exec exec, BackprojectKernel kernel)
{
  check_block(block, rows, geom);
  const std::vector<int> map = plane_rows(grid, rows, geom.pitch);
  ScalarField3 out(grid);
#pragma omp parallel for schedule(dynamic) num_threads(exec.resolved())
  for (int i = 0; i < grid.n(); ++i)
    backproject_one(block, rows, geom, axis, map, i, out, kernel);
  return out;
}

ScalarField3 fbp_axis(std::span<const double> block, int rows, const SinogramGeometry& geom, int axis,
                      const VoxelGrid3& grid, Exec exec, BackprojectKernel kernel)
{
  check_block(block, rows, geom);
  std::vector<double> filtered = ramp_filter_sinogram(block, geom.cols, geom.pitch);
  for (double& x : filtered)
    x *= 0.5;
  return backproject_axis(filtered, rows, geom, axis, grid, exec, kernel);
}

namespace {

struct AdjointSlots {
  int kk, ak, bk, aa, ab, bb;
};

AdjointSlots adjoint_slots(int k)
{
  const auto [a, b] = AxisFrame::plane_axes(k);
  return {SymTensor3::slot(k, k), SymTensor3::slot(a, k), SymTensor3::slot(b, k),
          SymTensor3::slot(a, a), SymTensor3::slot(a, b), SymTensor3::slot(b, b)};
}

/// Adds the transpose contribution of one detector pixel.
void adjoint_ray(const TrtDataSet& d, int slot, int j, int r, int c, const AxisFrame& frame, const AdjointSlots& s,
                 SymTensorField3& out)
{
  const double m0 = d.at(slot, j, r, c, kAxial);
  const double m1 = d.at(slot, j, r, c, kJ1);
  const double m2 = d.at(slot, j, r, c, kJ2);
  if (m0 == 0.0 && m1 == 0.0 && m2 == 0.0)
    return;
  const Ray ray = frame.ray(d.row_coord(r), d.col_coord(c));
  const auto [a, b] = AxisFrame::plane_axes(frame.axis);
  const Vec3 zeta = cross(ray.dir, frame.eta);
  const double za = zeta[static_cast<std::size_t>(a)];
  const double zb = zeta[static_cast<std::size_t>(b)];
  double* data = out.data.data();
  visit_ray(out.grid, ray, [&](std::size_t v, double w) {
    double* t = data + 6 * v;
    t[s.kk] += w * m0;
    t[s.ak] += w * m1 * za;
    t[s.bk] += w * m1 * zb;
    t[s.bb] += w * m2 * (zb * zb);
    t[s.ab] += w * m2 * (2.0 * zb * za);
    t[s.aa] += w * m2 * (za * za);
  });
}

void check_adjoint_input(const TrtDataSet& d)
{
  if (d.data.size() != d.axes.size() * static_cast<std::size_t>(d.n_angles) * d.rows * d.cols * TrtDataSet::kComponents)
    throw std::invalid_argument("trt_adjoint: data size does not match its dimensions");
}

}  // namespace

SymTensorField3 trt_adjoint(const TrtDataSet& d, const VoxelGrid3& grid, Exec exec)
{
  check_adjoint_input(d);
  SymTensorField3 out(grid);
  const int n = grid.n();
  const double h = grid.voxel_size();
  for (std::size_t slot = 0; slot < d.axes.size(); ++slot) {
    const int k = d.axes[slot];
    const AdjointSlots s = adjoint_slots(k);
    // Every ray about axis k stays in the voxel layer of its row, so layers are independent.
    // Within a layer the accumulation order (angle, row, col) matches the serial loop.
    std::vector<std::vector<int>> layer_rows(static_cast<std::size_t>(n));
    for (int r = 0; r < d.rows; ++r) {
      const double x = d.row_coord(r);
      if (x <= -grid.extent() || x >= grid.extent())
        continue;
      const int layer = std::clamp(static_cast<int>(std::floor((x + grid.extent()) / h)), 0, n - 1);
      layer_rows[static_cast<std::size_t>(layer)].push_back(r);
    }
#pragma omp parallel for schedule(dynamic) num_threads(exec.resolved())
    for (int layer = 0; layer < n; ++layer) {
      const auto& rs = layer_rows[static_cast<std::size_t>(layer)];
      if (rs.empty())
        continue;
      for (int j = 0; j < d.n_angles; ++j) {
        const AxisFrame frame(k, d.angle(j));
        for (int r : rs)
          for (int c = 0; c < d.cols; ++c)
            adjoint_ray(d, static_cast<int>(slot), j, r, c, frame, s, out);
      }
    }
  }
  return out;
}

namespace reference {

ScalarField3 backproject_axis(std::span<const double> block, int rows, const SinogramGeometry& geom, int axis,
                              const VoxelGrid3& grid, BackprojectKernel kernel)
{
  check_block(block, rows, geom);
  const std::vector<int> map = plane_rows(grid, rows, geom.pitch);
  ScalarField3 out(grid);
  for (int i = 0; i < grid.n(); ++i)
    backproject_one(block, rows, geom, axis, map, i, out, kernel);
  return out;
}

SymTensorField3 trt_adjoint(const TrtDataSet& d, const VoxelGrid3& grid)
{
  check_adjoint_input(d);
  SymTensorField3 out(grid);
  for (std::size_t slot = 0; slot < d.axes.size(); ++slot) {
    const AdjointSlots s = adjoint_slots(d.axes[slot]);
    for (int j = 0; j < d.n_angles; ++j) {
      const AxisFrame frame(d.axes[slot], d.angle(j));
      for (int r = 0; r < d.rows; ++r)
        for (int c = 0; c < d.cols; ++c)
          adjoint_ray(d, static_cast<int>(slot), j, r, c, frame, s, out);
    }
  }
  return out;
}

}  // namespace reference

}  // namespace trt
