#include "trt/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <unistd.h>

namespace trt {

namespace {

template <class T>
T to_little(T v)
{
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

class Writer {
public:
  void bytes(const char* p, std::size_t n) { out_.append(p, n); }
  void u32(std::uint32_t v)
  {
    v = to_little(v);
    bytes(reinterpret_cast<const char*>(&v), 4);
  }
  void f64(double v)
  {
    v = to_little(v);
    bytes(reinterpret_cast<const char*>(&v), 8);
  }
  void f64s(const std::vector<double>& vs)
  {
    if constexpr (std::endian::native == std::endian::little) {
      bytes(reinterpret_cast<const char*>(vs.data()), vs.size() * 8);
    } else {
      for (double v : vs)
        f64(v);
    }
  }
  const std::string& str() const { return out_; }

private:
  std::string out_;
};

class Reader {
public:
  Reader(std::string bytes, std::string name) : buf_(std::move(bytes)), name_(std::move(name)) {}

  void need(std::size_t n, const char* what) const
  {
    if (pos_ + n > buf_.size())
      throw FormatError(name_ + ": truncated at byte " + std::to_string(pos_) + " while reading " + what + " (need " +
                        std::to_string(n) + " bytes, " + std::to_string(buf_.size() - pos_) + " left)");
  }
  std::string magic()
  {
    need(4, "magic");
    std::string m = buf_.substr(pos_, 4);
    pos_ += 4;
    return m;
  }
  std::uint32_t u32(const char* what)
  {
    need(4, what);
    std::uint32_t v;
    std::memcpy(&v, buf_.data() + pos_, 4);
    pos_ += 4;
    return to_little(v);
  }
  double f64(const char* what)
  {
    need(8, what);
    double v;
    std::memcpy(&v, buf_.data() + pos_, 8);
    pos_ += 8;
    return to_little(v);
  }
  std::vector<double> payload(std::size_t count)
  {
    const std::size_t expect = count * 8;
    if (buf_.size() - pos_ != expect)
      throw FormatError(name_ + ": payload at byte " + std::to_string(pos_) + " has " + std::to_string(buf_.size() - pos_) +
                        " bytes, expected " + std::to_string(expect));
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
      v[i] = f64("payload");
    return v;
  }
  std::size_t pos() const { return pos_; }
  const std::string& name() const { return name_; }

private:
  std::string buf_;
  std::string name_;
  std::size_t pos_ = 0;
};

std::string slurp(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path.string() + " for reading");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string printable(const std::string& m)
{
  std::ostringstream s;
  for (unsigned char c : m) {
    if (c >= 32 && c < 127)
      s << c;
    else
      s << "\\x" << std::hex << static_cast<int>(c) << std::dec;
  }
  return s.str();
}

void expect_magic(Reader& r, const char* want)
{
  const std::string m = r.magic();
  if (m != want)
    throw FormatError(r.name() + ": bad magic at byte 0: found \"" + printable(m) + "\", expected \"" + want + "\"");
}

void expect_version(Reader& r, std::uint32_t want)
{
  const std::size_t at = r.pos();
  const std::uint32_t v = r.u32("version");
  if (v != want)
    throw FormatError(r.name() + ": unsupported version " + std::to_string(v) + " at byte " + std::to_string(at));
}

void write_field_raw(const std::filesystem::path& path, const VoxelGrid3& g, int comps, const std::vector<double>& data)
{
  Writer w;
  w.bytes("TTF1", 4);
  w.u32(kFieldVersion);
  w.u32(static_cast<std::uint32_t>(g.n()));
  w.f64(g.extent());
  w.u32(static_cast<std::uint32_t>(comps));
  w.f64s(data);
  write_atomic(path, w.str());
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& bytes)
{
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_field(const std::filesystem::path& path, const SymTensorField3& f) { write_field_raw(path, f.grid, 6, f.data); }
void write_field(const std::filesystem::path& path, const VectorField3& f) { write_field_raw(path, f.grid, 3, f.data); }
void write_field(const std::filesystem::path& path, const ScalarField3& f) { write_field_raw(path, f.grid, 1, f.data); }

FieldFile read_field_file(const std::filesystem::path& path)
{
  Reader r(slurp(path), path.string());
  expect_magic(r, "TTF1");
  expect_version(r, kFieldVersion);
  const std::uint32_t n = r.u32("n");
  const std::size_t extent_at = r.pos();
  const double extent = r.f64("extent");
  const std::size_t comps_at = r.pos();
  const std::uint32_t comps = r.u32("component count");
  if (comps != 1 && comps != 3 && comps != 6)
    throw FormatError(r.name() + ": component count " + std::to_string(comps) + " at byte " + std::to_string(comps_at) +
                      " is not 1, 3 or 6");
  if (n < 2 || !(extent > 0.0) || !std::isfinite(extent))
    throw FormatError(r.name() + ": invalid grid (n " + std::to_string(n) + ", extent at byte " + std::to_string(extent_at) + ")");
  const VoxelGrid3 grid(static_cast<int>(n), extent);
  std::vector<double> data = r.payload(grid.voxel_count() * comps);
  return {grid, static_cast<int>(comps), std::move(data)};
}

SymTensorField3 read_tensor_field(const std::filesystem::path& path)
{
  FieldFile ff = read_field_file(path);
  if (ff.components != 6)
    throw FormatError(path.string() + ": expected a tensor field (6 components), found " + std::to_string(ff.components));
  SymTensorField3 f(ff.grid);
  f.data = std::move(ff.data);
  return f;
}

void write_dataset(const std::filesystem::path& path, const TrtDataSet& d)
{
  Writer w;
  w.bytes("TTD1", 4);
  w.u32(kDataVersion);
  w.u32(static_cast<std::uint32_t>(d.axes.size()));
  w.u32(static_cast<std::uint32_t>(d.n_angles));
  w.u32(static_cast<std::uint32_t>(d.rows));
  w.u32(static_cast<std::uint32_t>(d.cols));
  w.u32(TrtDataSet::kComponents);
  for (std::size_t i = 0; i < 3; ++i) {
    const Vec3 v = i < d.axes.size() ? unit_axis(d.axes[i]) : Vec3{0.0, 0.0, 0.0};
    for (double x : v)
      w.f64(x);
  }
  w.f64(2.0 * kPi);
  w.f64(d.pitch);
  w.f64s(d.data);
  write_atomic(path, w.str());
}

TrtDataSet read_dataset(const std::filesystem::path& path)
{
  Reader r(slurp(path), path.string());
  expect_magic(r, "TTD1");
  expect_version(r, kDataVersion);
  const std::size_t dims_at = r.pos();
  const std::uint32_t n_axes = r.u32("axis count");
  const std::uint32_t n_angles = r.u32("angle count");
  const std::uint32_t h = r.u32("rows");
  const std::uint32_t w = r.u32("columns");
  const std::uint32_t comps = r.u32("component count");
  if (n_axes < 1 || n_axes > 3 || n_angles < 1 || h < 1 || w < 1 || comps != TrtDataSet::kComponents)
    throw FormatError(r.name() + ": invalid dimensions at byte " + std::to_string(dims_at));
  std::vector<int> axes;
  for (std::uint32_t i = 0; i < 3; ++i) {
    const std::size_t at = r.pos();
    Vec3 v;
    for (double& x : v)
      x = r.f64("axis vector");
    if (i < n_axes) {
      const int k = coordinate_axis_of(v);
      if (k < 0)
        throw FormatError(r.name() + ": axis vector at byte " + std::to_string(at) + " is not a coordinate axis");
      axes.push_back(k);
    }
  }
  const std::size_t range_at = r.pos();
  const double range = r.f64("angle range");
  if (std::abs(range - 2.0 * kPi) > 1e-12)
    throw FormatError(r.name() + ": angle range at byte " + std::to_string(range_at) + " is not 2 pi");
  const std::size_t pitch_at = r.pos();
  const double pitch = r.f64("pitch");
  if (!(pitch > 0.0) || !std::isfinite(pitch))
    throw FormatError(r.name() + ": invalid pitch at byte " + std::to_string(pitch_at));
  TrtDataSet d(std::move(axes), static_cast<int>(n_angles), static_cast<int>(h), static_cast<int>(w), pitch);
  const std::size_t payload_at = r.pos();
  d.data = r.payload(d.data.size());
  for (std::size_t i = 0; i < d.data.size(); ++i) {
    if (!std::isfinite(d.data[i]))
      throw FormatError(r.name() + ": non-finite value at byte " + std::to_string(payload_at + 8 * i));
  }
  return d;
}

void export_slice(const std::filesystem::path& path, const ScalarField3& f, int axis, int index, SliceFormat format,
                  double lo, double hi)
{
  if (axis < 0 || axis > 2)
    throw std::invalid_argument("export_slice: axis must be 0, 1 or 2");
  const int n = f.grid.n();
  if (index < 0 || index >= n)
    throw std::invalid_argument("export_slice: plane index " + std::to_string(index) + " outside [0, " + std::to_string(n) + ")");
  const auto value = [&](int u, int v) {
    const auto i = slab_voxel(axis, index, u, v);
    return f.at(i[0], i[1], i[2]);
  };

  if (format == SliceFormat::Pgm) {
    if (!(lo < hi))
      throw std::invalid_argument("export_slice: window minimum must be below the maximum");
    std::string bytes = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
    for (int v = 0; v < n; ++v) {
      for (int u = 0; u < n; ++u) {
        const double g = std::floor(255.0 * (value(u, v) - lo) / (hi - lo) + 0.5);
        bytes.push_back(static_cast<char>(static_cast<unsigned char>(std::clamp(g, 0.0, 255.0))));
      }
    }
    write_atomic(path, bytes);
    return;
  }

  std::ostringstream out;
  out.precision(17);
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u)
      out << (u ? "," : "") << value(u, v);
    out << '\n';
  }
  write_atomic(path, out.str());
}

}  // namespace trt
