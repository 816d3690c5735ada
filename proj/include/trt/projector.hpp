#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "trt/core_types.hpp"
#include "trt/parallel.hpp"

namespace trt {

struct Intersection {
  std::size_t voxel;
  double length;
};

/// Parametric interval [t_enter, t_exit] of the ray inside the grid's bounding box.
/// Returns false if the ray misses the box (rays lying exactly on a face miss).
bool clip_to_box(const VoxelGrid3& grid, const Ray& ray, double& t_enter, double& t_exit);

/// Incremental voxel traversal (Siddon lengths via Amanatides-Woo stepping).
/// Calls visit(voxel_index, intersection_length) in order along the ray.
template <class Visit>
void visit_ray(const VoxelGrid3& grid, const Ray& ray, Visit&& visit)
{
  double t = 0.0, t_exit = 0.0;
  if (!clip_to_box(grid, ray, t, t_exit))
    return;
  const int n = grid.n();
  const double lo = -grid.extent();
  const double h = grid.voxel_size();
  const double min_len = 1e-12 * h;

  int idx[3];
  int step[3];
  double t_next[3];
  const double t_mid = 0.5 * (t + t_exit);
  for (int d = 0; d < 3; ++d) {
    const double dir = ray.dir[static_cast<std::size_t>(d)];
    const double base = ray.base[static_cast<std::size_t>(d)];
    // Start index from a point strictly inside the chord for axis-parallel components,
    // from the entry point otherwise.
    const double x = base + (dir == 0.0 ? t_mid : t) * dir;
    int i = static_cast<int>(std::floor((x - lo) / h));
    i = std::clamp(i, 0, n - 1);
    idx[d] = i;
    if (dir > 0.0) {
      step[d] = 1;
      t_next[d] = (lo + (i + 1) * h - base) / dir;
    } else if (dir < 0.0) {
      step[d] = -1;
      t_next[d] = (lo + i * h - base) / dir;
    } else {
      step[d] = 0;
      t_next[d] = std::numeric_limits<double>::infinity();
    }
  }

  while (t < t_exit) {
    const double t_min_next = std::min({t_next[0], t_next[1], t_next[2]});
    const double t_end = std::min(t_min_next, t_exit);
    const double len = t_end - t;
    if (len > min_len)
      visit(grid.index(idx[0], idx[1], idx[2]), len);
    if (t_end >= t_exit)
      break;
    for (int d = 0; d < 3; ++d) {
      if (t_next[d] == t_min_next) {
        idx[d] += step[d];
        if (idx[d] < 0 || idx[d] >= n)
          return;
        const double dir = ray.dir[static_cast<std::size_t>(d)];
        const double base = ray.base[static_cast<std::size_t>(d)];
        t_next[d] = (lo + (step[d] > 0 ? idx[d] + 1 : idx[d]) * h - base) / dir;
      }
    }
    t = t_end;
  }
}

/// Voxels crossed by the ray with their intersection lengths, ordered along the ray.
/// Empty if the ray misses the grid.
std::vector<Intersection> trace_ray(const VoxelGrid3& grid, const Ray& ray);

/// Length of the ray's chord through the grid bounding box (0 if it misses).
double chord_length(const VoxelGrid3& grid, const Ray& ray);

/// Per-ray TRT measurement about a rotation axis.
struct TrtSample {
  double axial;  ///< <eta, Jf eta>
  double j1;     ///< <Jf eta, xi x eta>
  double j2;     ///< <zeta, Jf zeta>
};

enum DataComponent : int { kAxial = 0, kJ1 = 1, kJ2 = 2 };

/// Sums the three TRT components over the voxels traced by the ray. The ray direction
/// must lie in eta-perp (1e-12); the frame supplies eta, zeta is recomputed from the ray.
TrtSample forward_trt_ray(const SymTensorField3& f, const AxisFrame& frame, const Ray& ray);

/// In-plane vector field on a slab, two components (u, v) per pixel along plane_axes(axis).
struct VectorSlab {
  int n;
  int axis;
  int s_index;
  std::vector<double> data;

  double at(int u, int v, int comp) const { return data[2 * (static_cast<std::size_t>(u) + static_cast<std::size_t>(n) * v) + static_cast<std::size_t>(comp)]; }
};

/// The in-plane field eta x f eta on plane s_index of the given coordinate axis.
VectorSlab cross_axis_slab(const SymTensorField3& f, int axis, int s_index);

/// Slab whose pixels hold adjugate2 of the original slab's pixels.
TensorSlab adjugate_slab(const TensorSlab& slab);

/// Planar longitudinal ray transforms on a slab; the ray must lie in the slab plane.
/// Vector case: sum w <g, xi>. Tensor case: sum w <g xi, xi>, using only the in-plane block.
double lrt_plane(const VectorSlab& slab, const VoxelGrid3& grid, const Ray& ray);
double lrt_plane(const TensorSlab& slab, const VoxelGrid3& grid, const Ray& ray);

/// Parallel-beam acquisition about a list of coordinate axes.
struct AcquisitionConfig {
  std::vector<Vec3> axes{unit_axis(0), unit_axis(1), unit_axis(2)};
  int n_angles = 120;       ///< uniform over [0, 2 pi)
  int detector_h = 0;       ///< rows along the rotation axis; 0 = grid n
  int detector_w = 0;       ///< columns along zeta; 0 = about 4/3 of the rows
  double pixel_pitch = 0.0; ///< 0 = grid voxel size
  int bin_factor = 1;       ///< mean pooling over bin x bin pixel blocks
  double noise_pct = 0.0;   ///< noise sigma as a fraction of max |data| (0.01 = 1 %)
  std::uint64_t seed = 0;

  /// Fills defaults from the grid and validates.
  AcquisitionConfig resolved(const VoxelGrid3& grid) const;
  void validate() const;
};

/// Detector width for h rows: about 4h/3, a multiple of bin, with the binned width having
/// the same parity as the binned height (so detector columns sit on voxel centres).
int default_detector_width(int h, int bin);

/// Simulated measurements, indexed [axis][angle][row][col][component].
struct TrtDataSet {
  std::vector<int> axes;  ///< coordinate axis index (0, 1, 2) per acquired axis
  int n_angles = 0;
  int rows = 0;
  int cols = 0;
  double pitch = 0.0;
  std::vector<double> data;

  static constexpr int kComponents = 3;

  TrtDataSet() = default;
  TrtDataSet(std::vector<int> axes, int n_angles, int rows, int cols, double pitch);

  double angle(int j) const { return 2.0 * kPi * j / n_angles; }
  /// Detector row/column coordinates (s along eta, p along zeta).
  double row_coord(int r) const { return (r - 0.5 * (rows - 1)) * pitch; }
  double col_coord(int c) const { return (c - 0.5 * (cols - 1)) * pitch; }

  std::size_t index(int axis_slot, int angle, int row, int col, int comp) const
  {
    return (((static_cast<std::size_t>(axis_slot) * n_angles + angle) * rows + row) * cols + col) * kComponents + static_cast<std::size_t>(comp);
  }
  double& at(int axis_slot, int angle, int row, int col, int comp) { return data[index(axis_slot, angle, row, col, comp)]; }
  double at(int axis_slot, int angle, int row, int col, int comp) const { return data[index(axis_slot, angle, row, col, comp)]; }

  /// Slot of the coordinate axis in this data set, or -1.
  int slot_of(int coordinate_axis) const;

  /// Grid whose voxels line up with the detector: n = rows, voxel size = pitch.
  VoxelGrid3 reconstruction_grid() const;

  /// One component as a contiguous [angle][row][col] block.
  std::vector<double> component_block(int axis_slot, int comp) const;
};

/// Forward TRT for every axis, angle and detector pixel, then binning, then noise.
TrtDataSet simulate_acquisition(const SymTensorField3& f, const AcquisitionConfig& cfg, Exec exec = {});

/// Mean pooling over bin x bin detector blocks.
TrtDataSet bin_detector(const TrtDataSet& d, int bin);

/// Adds N(0, sigma^2) with sigma = noise_pct * max|data|. Each (axis, angle) block draws
/// from its own generator seeded by (seed, axis, angle).
void add_noise(TrtDataSet& d, double noise_pct, std::uint64_t seed);

namespace reference {
/// Serial acquisition (no binning, no noise): a plain loop over forward_trt_ray.
TrtDataSet forward_acquisition(const SymTensorField3& f, const AcquisitionConfig& resolved_cfg);
}  // namespace reference

}  // namespace trt
