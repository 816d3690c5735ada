// trt: phantoms, simulated acquisitions, reconstructions and comparisons from the command line.
// Exit status: 0 success, 1 runtime failure, 2 usage error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "trt/io.hpp"
#include "trt/phantoms.hpp"
#include "trt/projector.hpp"
#include "trt/reconstruct.hpp"

using namespace trt;
using nlohmann::json;

namespace {

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

void normalise(SymTensorField3& f)
{
  double m = 0.0;
  for (double v : f.data)
    m = std::max(m, std::abs(v));
  if (m > 0.0)
    for (double& v : f.data)
      v /= m;
}

// ---- phantom --------------------------------------------------------------------------

struct PhantomArgs {
  std::string kind;
  int n = 64;
  double extent = 1.0;
  std::string out;
};

void run_phantom(const PhantomArgs& a)
{
  const VoxelGrid3 g(a.n, a.extent);
  SymTensorField3 f(g);
  if (a.kind == "smooth") {
    f = smooth_phantom(g);
  } else if (a.kind == "sharp") {
    f = sharp_phantom(g);
  } else if (a.kind == "potential") {
    f = potential_field(g, default_displacement());
  } else if (a.kind == "null1") {
    NullFieldResult r = one_axis_null_field(g, gaussian_u2_generator());
    for (const std::string& w : r.warnings)
      warn(w);
    f = std::move(r.f);
    normalise(f);
  } else {  // null2
    f = two_axis_null_field(default_seed(g));
    normalise(f);
  }
  write_field(a.out, f);
}

// ---- simulate -------------------------------------------------------------------------

struct SimulateArgs {
  std::string field;
  std::string axes = "1,2,3";
  int angles = 120;
  double noise_pct = 0.0;
  int bin = 1;
  std::uint64_t seed = 0;
  std::string out;
};

std::vector<Vec3> parse_axes(const std::string& text)
{
  std::vector<Vec3> axes;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.size() == 2 && item[0] == 'e')
      item = item.substr(1);
    if (item != "1" && item != "2" && item != "3")
      throw CLI::ValidationError("--axes", "expected a comma-separated list of 1, 2, 3 (or e1, e2, e3), got \"" + text + "\"");
    const Vec3 v = unit_axis(item[0] - '1');
    for (const Vec3& a : axes)
      if (a == v)
        throw CLI::ValidationError("--axes", "axis e" + item + " listed twice");
    axes.push_back(v);
  }
  if (axes.empty())
    throw CLI::ValidationError("--axes", "no axes given");
  return axes;
}

void run_simulate(const SimulateArgs& a)
{
  const SymTensorField3 f = read_tensor_field(a.field);
  AcquisitionConfig cfg;
  cfg.axes = parse_axes(a.axes);
  cfg.n_angles = a.angles;
  cfg.noise_pct = a.noise_pct / 100.0;
  cfg.bin_factor = a.bin;
  cfg.seed = a.seed;
  write_dataset(a.out, simulate_acquisition(f, cfg));
}

// ---- reconstruct ----------------------------------------------------------------------

struct ReconstructArgs {
  std::string data;
  std::string mode = "three-axis";
  std::string out;
  std::string u_out;
};

void run_reconstruct(const ReconstructArgs& a)
{
  const TrtDataSet d = read_dataset(a.data);
  if (a.mode == "three-axis") {
    const ThreeAxisResult r = reconstruct_three_axis_report(d);
    if (r.imag_ratio > 1e-6)
      warn("imaginary residue " + std::to_string(r.imag_ratio) + " after the inverse transform");
    write_field(a.out, r.f);
  } else if (a.mode == "two-axis-potential") {
    const TwoAxisResult r = reconstruct_two_axis_potential(d);
    for (const std::string& w : r.warnings)
      warn(w);
    write_field(a.out, r.f);
    if (!a.u_out.empty())
      write_field(a.u_out, r.u);
  } else {  // diagonals-alt
    const auto diag = reconstruct_diagonals_alternative(d);
    SymTensorField3 f(d.reconstruction_grid());
    f.set_component(0, diag[0]);
    f.set_component(3, diag[1]);
    f.set_component(5, diag[2]);
    write_field(a.out, f);
  }
}

// ---- compare --------------------------------------------------------------------------

struct CompareArgs {
  std::string a;
  std::string b;
  std::string report;
  double band = 0.8;
};

void run_compare(const CompareArgs& args)
{
  const FieldFile a = read_field_file(args.a);
  const FieldFile b = read_field_file(args.b);
  if (!(a.grid == b.grid) || a.components != b.components)
    throw std::runtime_error("compare: " + args.a + " and " + args.b + " differ in grid or component count");

  const auto component = [](const FieldFile& f, int c) {
    ScalarField3 s(f.grid);
    for (std::size_t v = 0; v < s.data.size(); ++v)
      s.data[v] = f.data[v * static_cast<std::size_t>(f.components) + static_cast<std::size_t>(c)];
    return s;
  };
  json rep;
  rep["a"] = args.a;
  rep["b"] = args.b;
  rep["n"] = a.grid.n();
  rep["band_fraction"] = args.band;
  double num = 0.0, den = 0.0, max_diff = 0.0;
  for (int c = 0; c < a.components; ++c) {
    const ScalarField3 ca = component(a, c), cb = component(b, c);
    const std::string name = a.components == 6 ? kComponentNames[static_cast<std::size_t>(c)] : "c" + std::to_string(c);
    double d2 = 0.0, b2 = 0.0, md = 0.0;
    for (std::size_t v = 0; v < ca.data.size(); ++v) {
      d2 += (ca.data[v] - cb.data[v]) * (ca.data[v] - cb.data[v]);
      b2 += cb.data[v] * cb.data[v];
      md = std::max(md, std::abs(ca.data[v] - cb.data[v]));
    }
    rep["components"][name] = {{"relative_l2", relative_l2(ca, cb)},
                               {"band_limited_relative_l2", band_limited_relative_l2(ca, cb, args.band)},
                               {"max_abs_difference", md}};
    num += d2;
    den += b2;
    max_diff = std::max(max_diff, md);
  }
  rep["aggregate_relative_l2"] = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  rep["max_abs_difference"] = max_diff;
  const std::string text = rep.dump(2) + "\n";
  std::cout << text;
  if (!args.report.empty())
    write_atomic(args.report, text);
}

// ---- export-slice ---------------------------------------------------------------------

struct ExportArgs {
  std::string field;
  std::string component = "f11";
  int axis = 3;
  int index = -1;
  std::string format = "pgm";
  double lo = -1.0;
  double hi = 1.0;
  std::string out;
};

void run_export(const ExportArgs& a)
{
  if (a.format == "pgm" && !(a.lo < a.hi))
    throw CLI::ValidationError("--min/--max", "the window minimum must be below the maximum");
  const FieldFile f = read_field_file(a.field);
  int comp = 0;
  if (f.components == 6) {
    const auto it = std::find(kComponentNames.begin(), kComponentNames.end(), a.component);
    if (it == kComponentNames.end())
      throw CLI::ValidationError("--component", "expected one of f11 f12 f13 f22 f23 f33, got \"" + a.component + "\"");
    comp = static_cast<int>(it - kComponentNames.begin());
  } else if (f.components == 3) {
    const std::map<std::string, int> names{{"u1", 0}, {"u2", 1}, {"u3", 2}};
    if (!names.count(a.component))
      throw CLI::ValidationError("--component", "vector fields have components u1 u2 u3, got \"" + a.component + "\"");
    comp = names.at(a.component);
  }
  ScalarField3 s(f.grid);
  for (std::size_t v = 0; v < s.data.size(); ++v)
    s.data[v] = f.data[v * static_cast<std::size_t>(f.components) + static_cast<std::size_t>(comp)];
  const int index = a.index < 0 ? f.grid.n() / 2 : a.index;
  export_slice(a.out, s, a.axis - 1, index, a.format == "csv" ? SliceFormat::Csv : SliceFormat::Pgm, a.lo, a.hi);
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Transverse ray transform toolkit. TRT_THREADS caps the worker threads."};
  app.require_subcommand(1);

  PhantomArgs pa;
  CLI::App* phantom = app.add_subcommand("phantom", "Write a test field");
  phantom->add_option("--kind", pa.kind, "smooth | sharp | potential | null1 | null2")
      ->required()
      ->check(CLI::IsMember({"smooth", "sharp", "potential", "null1", "null2"}));
  phantom->add_option("--n", pa.n, "Voxels per edge")->capture_default_str()->check(CLI::Range(2, 4096));
  phantom->add_option("--extent", pa.extent, "Half-width of the cubic domain")->capture_default_str()->check(CLI::PositiveNumber);
  phantom->add_option("--out", pa.out, "Output field file")->required();

  SimulateArgs sa;
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate a parallel-beam acquisition of a tensor field");
  simulate->add_option("--field", sa.field, "Input tensor field file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--axes", sa.axes, "Rotation axes, e.g. 1,2,3 or e1,e2")->capture_default_str();
  simulate->add_option("--angles", sa.angles, "Angles per axis over [0, 2 pi)")->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--noise", sa.noise_pct, "Noise sigma in percent of the data maximum")->capture_default_str()->check(CLI::NonNegativeNumber);
  simulate->add_option("--bin", sa.bin, "Detector binning factor")->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sa.seed, "Noise seed")->capture_default_str();
  simulate->add_option("--out", sa.out, "Output data file")->required();

  ReconstructArgs ra;
  CLI::App* reconstruct = app.add_subcommand("reconstruct", "Reconstruct a tensor field from a data file");
  reconstruct->add_option("--data", ra.data, "Input data file")->required()->check(CLI::ExistingFile);
  reconstruct->add_option("--mode", ra.mode, "three-axis | two-axis-potential | diagonals-alt")
      ->capture_default_str()
      ->check(CLI::IsMember({"three-axis", "two-axis-potential", "diagonals-alt"}));
  reconstruct->add_option("--out", ra.out, "Output tensor field file")->required();
  reconstruct->add_option("--u-out", ra.u_out, "Displacement output (two-axis-potential only)");

  CompareArgs ca;
  CLI::App* compare = app.add_subcommand("compare", "Relative errors of field A against reference B as JSON");
  compare->add_option("--a", ca.a, "Field under test")->required()->check(CLI::ExistingFile);
  compare->add_option("--b", ca.b, "Reference field")->required()->check(CLI::ExistingFile);
  compare->add_option("--report", ca.report, "Also write the JSON report here");
  compare->add_option("--band", ca.band, "Kept fraction of the band for the band-limited metric")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));

  ExportArgs ea;
  CLI::App* slice = app.add_subcommand("export-slice", "Write one plane of a field component as PGM or CSV");
  slice->add_option("--field", ea.field, "Input field file")->required()->check(CLI::ExistingFile);
  slice->add_option("--component", ea.component, "f11 ... f33 for tensors, u1 ... u3 for vectors")->capture_default_str();
  slice->add_option("--axis", ea.axis, "Plane normal 1, 2 or 3")->capture_default_str()->check(CLI::Range(1, 3));
  slice->add_option("--index", ea.index, "Plane index (default: middle)");
  slice->add_option("--format", ea.format, "pgm | csv")->capture_default_str()->check(CLI::IsMember({"pgm", "csv"}));
  slice->add_option("--min", ea.lo, "PGM window minimum")->capture_default_str();
  slice->add_option("--max", ea.hi, "PGM window maximum")->capture_default_str();
  slice->add_option("--out", ea.out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << " (see --help)\n";
    return 2;
  }

  try {
    if (*phantom)
      run_phantom(pa);
    else if (*simulate)
      run_simulate(sa);
    else if (*reconstruct)
      run_reconstruct(ra);
    else if (*compare)
      run_compare(ca);
    else
      run_export(ea);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
