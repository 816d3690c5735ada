#include "trt/projector.hpp"

#include <random>
#include <string>

#include <omp.h>

namespace trt {

bool clip_to_box(const VoxelGrid3& grid, const Ray& ray, double& t_enter, double& t_exit)
{
  const double lo = -grid.extent();
  const double hi = grid.extent();
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < 3; ++d) {
    const double dir = ray.dir[d];
    const double base = ray.base[d];
    if (dir == 0.0) {
      if (base <= lo || base >= hi)
        return false;
      continue;
    }
    double a = (lo - base) / dir;
    double b = (hi - base) / dir;
    if (a > b)
      std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  if (!(t1 > t0))
    return false;
  t_enter = t0;
  t_exit = t1;
  return true;
}

std::vector<Intersection> trace_ray(const VoxelGrid3& grid, const Ray& ray)
{
  if (std::abs(norm(ray.dir) - 1.0) > 1e-12)
    throw std::invalid_argument("trace_ray: direction is not unit length");
  std::vector<Intersection> out;
  visit_ray(grid, ray, [&](std::size_t v, double len) { out.push_back({v, len}); });
  return out;
}

double chord_length(const VoxelGrid3& grid, const Ray& ray)
{
  double t0 = 0.0, t1 = 0.0;
  return clip_to_box(grid, ray, t0, t1) ? t1 - t0 : 0.0;
}

namespace {

int frame_axis(const AxisFrame& frame, const Ray& ray)
{
  if (std::abs(dot(ray.dir, frame.eta)) > 1e-12)
    throw std::invalid_argument("forward_trt_ray: ray direction is not orthogonal to the rotation axis");
  return frame.axis;
}

}  // namespace

TrtSample forward_trt_ray(const SymTensorField3& f, const AxisFrame& frame, const Ray& ray)
{
  const int k = frame_axis(frame, ray);
  const auto [a, b] = AxisFrame::plane_axes(k);
  const Vec3 zeta = cross(ray.dir, frame.eta);
  const double za = zeta[static_cast<std::size_t>(a)];
  const double zb = zeta[static_cast<std::size_t>(b)];
  const int s_kk = SymTensor3::slot(k, k);
  const int s_ak = SymTensor3::slot(a, k);
  const int s_bk = SymTensor3::slot(b, k);
  const int s_aa = SymTensor3::slot(a, a);
  const int s_ab = SymTensor3::slot(a, b);
  const int s_bb = SymTensor3::slot(b, b);
  const double* data = f.data.data();

  TrtSample m{0.0, 0.0, 0.0};
  visit_ray(f.grid, ray, [&](std::size_t v, double w) {
    const double* t = data + 6 * v;
    // zeta has no eta component, so <f eta, zeta> and <zeta, f zeta> only see in-plane entries.
    // Term order matches lrt_plane on the cross-product and adjugate slabs.
    m.axial += w * t[s_kk];
    m.j1 += w * (t[s_ak] * za + t[s_bk] * zb);
    m.j2 += w * (t[s_bb] * (zb * zb) + 2.0 * t[s_ab] * zb * za + t[s_aa] * (za * za));
  });
  return m;
}

VectorSlab cross_axis_slab(const SymTensorField3& f, int axis, int s_index)
{
  const TensorSlab t = slice_field(f, axis, s_index);
  const int n = t.n;
  const auto [a, b] = AxisFrame::plane_axes(axis);
  const int s_ak = SymTensor3::slot(a, axis);
  const int s_bk = SymTensor3::slot(b, axis);
  VectorSlab out{n, axis, s_index, std::vector<double>(2 * static_cast<std::size_t>(n) * n)};
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u) {
      // e_k x w = w_a e_b - w_b e_a for the cyclic triple (k, a, b)
      const std::size_t p = static_cast<std::size_t>(u) + static_cast<std::size_t>(n) * v;
      out.data[2 * p] = -t.at(u, v, s_bk);
      out.data[2 * p + 1] = t.at(u, v, s_ak);
    }
  }
  return out;
}

TensorSlab adjugate_slab(const TensorSlab& slab)
{
  TensorSlab out{slab.n, slab.axis, slab.s_index, std::vector<double>(slab.data.size(), 0.0)};
  for (std::size_t p = 0; p < slab.data.size() / 6; ++p) {
    SymTensor3 t;
    for (std::size_t c = 0; c < 6; ++c)
      t.c[c] = slab.data[6 * p + c];
    const SymTensor3 r = adjugate2(t, slab.axis);
    for (std::size_t c = 0; c < 6; ++c)
      out.data[6 * p + c] = r.c[c];
  }
  return out;
}

namespace {

/// Runs visit(u, v, w) over the slab pixels crossed by an in-plane ray.
template <class Visit>
void visit_slab(int slab_n, int axis, int s_index, const VoxelGrid3& grid, const Ray& ray, Visit&& visit)
{
  if (grid.n() != slab_n)
    throw std::invalid_argument("lrt_plane: slab and grid sizes differ");
  if (std::abs(ray.dir[static_cast<std::size_t>(axis)]) > 1e-12)
    throw std::invalid_argument("lrt_plane: ray is not parallel to the slab plane");
  const auto [a, b] = AxisFrame::plane_axes(axis);
  const std::size_t n = static_cast<std::size_t>(grid.n());
  visit_ray(grid, ray, [&](std::size_t vox, double w) {
    const std::size_t i[3] = {vox % n, (vox / n) % n, vox / (n * n)};
    if (static_cast<int>(i[axis]) != s_index)
      throw std::invalid_argument("lrt_plane: ray leaves the slab plane");
    visit(static_cast<int>(i[a]), static_cast<int>(i[b]), w);
  });
}

}  // namespace

double lrt_plane(const VectorSlab& slab, const VoxelGrid3& grid, const Ray& ray)
{
  const auto [a, b] = AxisFrame::plane_axes(slab.axis);
  const double xa = ray.dir[static_cast<std::size_t>(a)];
  const double xb = ray.dir[static_cast<std::size_t>(b)];
  double sum = 0.0;
  visit_slab(slab.n, slab.axis, slab.s_index, grid, ray,
             [&](int u, int v, double w) { sum += w * (slab.at(u, v, 0) * xa + slab.at(u, v, 1) * xb); });
  return sum;
}

double lrt_plane(const TensorSlab& slab, const VoxelGrid3& grid, const Ray& ray)
{
  const auto [a, b] = AxisFrame::plane_axes(slab.axis);
  const double xa = ray.dir[static_cast<std::size_t>(a)];
  const double xb = ray.dir[static_cast<std::size_t>(b)];
  const int s_aa = SymTensor3::slot(a, a);
  const int s_ab = SymTensor3::slot(a, b);
  const int s_bb = SymTensor3::slot(b, b);
  double sum = 0.0;
  visit_slab(slab.n, slab.axis, slab.s_index, grid, ray, [&](int u, int v, double w) {
    sum += w * (slab.at(u, v, s_aa) * (xa * xa) + 2.0 * slab.at(u, v, s_ab) * xa * xb + slab.at(u, v, s_bb) * (xb * xb));
  });
  return sum;
}

int default_detector_width(int h, int bin)
{
  if (bin < 1 || h % bin != 0)
    throw std::invalid_argument("default_detector_width: bin factor must divide the row count");
  const int hb = h / bin;
  int wb = static_cast<int>(std::lround(4.0 * hb / 3.0));
  if ((wb - hb) % 2 != 0)
    wb += 1;
  return wb * bin;
}

AcquisitionConfig AcquisitionConfig::resolved(const VoxelGrid3& grid) const
{
  AcquisitionConfig c = *this;
  if (c.detector_h == 0)
    c.detector_h = grid.n();
  if (c.pixel_pitch == 0.0)
    c.pixel_pitch = grid.voxel_size();
  if (c.detector_w == 0 && c.bin_factor >= 1 && c.detector_h % c.bin_factor == 0)
    c.detector_w = default_detector_width(c.detector_h, c.bin_factor);
  c.validate();
  return c;
}

void AcquisitionConfig::validate() const
{
  if (axes.empty() || axes.size() > 3)
    throw std::invalid_argument("AcquisitionConfig: between one and three axes required");
  std::array<bool, 3> seen{};
  for (const auto& ax : axes) {
    const int k = coordinate_axis_of(ax);
    if (k < 0)
      throw std::invalid_argument("AcquisitionConfig: axes must be coordinate unit vectors e1, e2, e3");
    if (seen[static_cast<std::size_t>(k)])
      throw std::invalid_argument("AcquisitionConfig: repeated axis");
    seen[static_cast<std::size_t>(k)] = true;
  }
  if (n_angles < 1)
    throw std::invalid_argument("AcquisitionConfig: n_angles must be >= 1");
  if (detector_h < 1 || detector_w < 1)
    throw std::invalid_argument("AcquisitionConfig: detector dimensions must be >= 1");
  if (!(pixel_pitch > 0.0))
    throw std::invalid_argument("AcquisitionConfig: pixel pitch must be positive");
  if (bin_factor < 1 || detector_h % bin_factor != 0 || detector_w % bin_factor != 0)
    throw std::invalid_argument("AcquisitionConfig: bin factor " + std::to_string(bin_factor) + " must divide detector " +
                                std::to_string(detector_h) + "x" + std::to_string(detector_w));
  if (!(noise_pct >= 0.0) || !std::isfinite(noise_pct))
    throw std::invalid_argument("AcquisitionConfig: noise_pct must be >= 0");
}

TrtDataSet::TrtDataSet(std::vector<int> axes_, int n_angles_, int rows_, int cols_, double pitch_)
    : axes(std::move(axes_)), n_angles(n_angles_), rows(rows_), cols(cols_), pitch(pitch_),
      data(axes.size() * static_cast<std::size_t>(n_angles_) * rows_ * cols_ * kComponents, 0.0)
{
}

int TrtDataSet::slot_of(int coordinate_axis) const
{
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (axes[i] == coordinate_axis)
      return static_cast<int>(i);
  }
  return -1;
}

VoxelGrid3 TrtDataSet::reconstruction_grid() const { return VoxelGrid3(rows, 0.5 * rows * pitch); }

std::vector<double> TrtDataSet::component_block(int axis_slot, int comp) const
{
  std::vector<double> out(static_cast<std::size_t>(n_angles) * rows * cols);
  std::size_t o = 0;
  for (int j = 0; j < n_angles; ++j)
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        out[o++] = at(axis_slot, j, r, c, comp);
  return out;
}

namespace {

TrtDataSet empty_dataset(const AcquisitionConfig& cfg)
{
  std::vector<int> axes;
  for (const auto& ax : cfg.axes)
    axes.push_back(coordinate_axis_of(ax));
  return TrtDataSet(std::move(axes), cfg.n_angles, cfg.detector_h, cfg.detector_w, cfg.pixel_pitch);
}

void project_block(const SymTensorField3& f, TrtDataSet& d, int slot, int j)
{
  const AxisFrame frame(d.axes[static_cast<std::size_t>(slot)], d.angle(j));
  for (int r = 0; r < d.rows; ++r) {
    const double s = d.row_coord(r);
    for (int c = 0; c < d.cols; ++c) {
      const TrtSample m = forward_trt_ray(f, frame, frame.ray(s, d.col_coord(c)));
      d.at(slot, j, r, c, kAxial) = m.axial;
      d.at(slot, j, r, c, kJ1) = m.j1;
      d.at(slot, j, r, c, kJ2) = m.j2;
    }
  }
}

}  // namespace

TrtDataSet simulate_acquisition(const SymTensorField3& f, const AcquisitionConfig& cfg_in, Exec exec)
{
  const AcquisitionConfig cfg = cfg_in.resolved(f.grid);
  TrtDataSet d = empty_dataset(cfg);
  const int n_axes = static_cast<int>(d.axes.size());
  const int blocks = n_axes * d.n_angles;
#pragma omp parallel for schedule(dynamic) num_threads(exec.resolved())
  for (int blk = 0; blk < blocks; ++blk)
    project_block(f, d, blk / d.n_angles, blk % d.n_angles);

  if (cfg.bin_factor > 1)
    d = bin_detector(d, cfg.bin_factor);
  if (cfg.noise_pct > 0.0)
    add_noise(d, cfg.noise_pct, cfg.seed);
  return d;
}

TrtDataSet bin_detector(const TrtDataSet& d, int bin)
{
  if (bin < 1 || d.rows % bin != 0 || d.cols % bin != 0)
    throw std::invalid_argument("bin_detector: bin factor must divide the detector dimensions");
  TrtDataSet out(d.axes, d.n_angles, d.rows / bin, d.cols / bin, d.pitch * bin);
  const double scale = 1.0 / (static_cast<double>(bin) * bin);
  for (std::size_t slot = 0; slot < d.axes.size(); ++slot) {
    for (int j = 0; j < d.n_angles; ++j) {
      for (int r = 0; r < out.rows; ++r) {
        for (int c = 0; c < out.cols; ++c) {
          for (int comp = 0; comp < 3; ++comp) {
            double sum = 0.0;
            for (int dr = 0; dr < bin; ++dr)
              for (int dc = 0; dc < bin; ++dc)
                sum += d.at(static_cast<int>(slot), j, r * bin + dr, c * bin + dc, comp);
            out.at(static_cast<int>(slot), j, r, c, comp) = sum * scale;
          }
        }
      }
    }
  }
  return out;
}

void add_noise(TrtDataSet& d, double noise_pct, std::uint64_t seed)
{
  double peak = 0.0;
  for (double v : d.data)
    peak = std::max(peak, std::abs(v));
  const double sigma = noise_pct * peak;
  if (!(sigma > 0.0))
    return;
  const std::size_t block = static_cast<std::size_t>(d.rows) * d.cols * TrtDataSet::kComponents;
  for (std::size_t slot = 0; slot < d.axes.size(); ++slot) {
    for (int j = 0; j < d.n_angles; ++j) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(d.axes[slot]), static_cast<std::uint32_t>(j)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> normal(0.0, sigma);
      double* p = d.data.data() + d.index(static_cast<int>(slot), j, 0, 0, 0);
      for (std::size_t i = 0; i < block; ++i)
        p[i] += normal(rng);
    }
  }
}

namespace reference {

TrtDataSet forward_acquisition(const SymTensorField3& f, const AcquisitionConfig& resolved_cfg)
{
  resolved_cfg.validate();
  TrtDataSet d = empty_dataset(resolved_cfg);
  for (std::size_t slot = 0; slot < d.axes.size(); ++slot) {
    for (int j = 0; j < d.n_angles; ++j) {
      const AxisFrame frame(d.axes[slot], d.angle(j));
      for (int r = 0; r < d.rows; ++r) {
        for (int c = 0; c < d.cols; ++c) {
          const Ray ray = frame.ray(d.row_coord(r), d.col_coord(c));
          const TrtSample m = forward_trt_ray(f, frame, ray);
          d.at(static_cast<int>(slot), j, r, c, kAxial) = m.axial;
          d.at(static_cast<int>(slot), j, r, c, kJ1) = m.j1;
          d.at(static_cast<int>(slot), j, r, c, kJ2) = m.j2;
        }
      }
    }
  }
  return d;
}

}  // namespace reference

}  // namespace trt
