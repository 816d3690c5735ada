#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "trt/core_types.hpp"
#include "trt/projector.hpp"

namespace trt {

/// Malformed or unreadable file. The message names the byte offset where parsing stopped.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Contents of a field file ("TTF1"): n^3 voxels with 1, 3 or 6 components each,
/// component fastest, then x1, x2, x3. All numbers little endian.
struct FieldFile {
  VoxelGrid3 grid;
  int components;
  std::vector<double> data;
};

inline constexpr std::uint32_t kFieldVersion = 1;
inline constexpr std::uint32_t kDataVersion = 1;

void write_field(const std::filesystem::path& path, const SymTensorField3& f);
void write_field(const std::filesystem::path& path, const VectorField3& f);
void write_field(const std::filesystem::path& path, const ScalarField3& f);

FieldFile read_field_file(const std::filesystem::path& path);
/// Requires six components.
SymTensorField3 read_tensor_field(const std::filesystem::path& path);

/// Data file ("TTD1"): dimensions, the acquisition axes (3 x 3 doubles, unused rows zero),
/// the angle range 2 pi, the detector pitch, then the [axis][angle][row][col][component] payload.
void write_dataset(const std::filesystem::path& path, const TrtDataSet& d);
TrtDataSet read_dataset(const std::filesystem::path& path);

enum class SliceFormat { Pgm, Csv };

/// One plane of a scalar field, rows along plane_axes(axis)[1], columns along plane_axes(axis)[0].
/// PGM: binary P5, 8 bit, gray = floor(255 (v - lo) / (hi - lo) + 0.5) clamped to [0, 255], so a
/// value at the window centre maps to 128. CSV: one line per row, values printed with 17
/// significant digits. Requires lo < hi for PGM.
void export_slice(const std::filesystem::path& path, const ScalarField3& f, int axis, int index, SliceFormat format,
                  double lo = 0.0, double hi = 1.0);

/// Writes bytes to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace trt
