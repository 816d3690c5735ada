// Serial reference kernels against the OpenMP kernels on the same inputs.
// The argument is the grid size n; thread counts follow TRT_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "trt/backprojection.hpp"
#include "trt/phantoms.hpp"
#include "trt/projector.hpp"

namespace {

using namespace trt;

constexpr int kAngles = 32;

AcquisitionConfig config(const VoxelGrid3& g)
{
  AcquisitionConfig cfg;
  cfg.n_angles = kAngles;
  return cfg.resolved(g);
}

TrtDataSet random_data(const VoxelGrid3& g)
{
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  TrtDataSet d = reference::forward_acquisition(smooth_phantom(g), config(g));
  for (double& v : d.data)
    v = normal(rng);
  return d;
}

void BM_forward_reference(benchmark::State& st)
{
  const VoxelGrid3 g(static_cast<int>(st.range(0)), 1.0);
  const SymTensorField3 f = smooth_phantom(g);
  const AcquisitionConfig cfg = config(g);
  for (auto _ : st)
    benchmark::DoNotOptimize(reference::forward_acquisition(f, cfg));
}

void BM_forward_parallel(benchmark::State& st)
{
  const VoxelGrid3 g(static_cast<int>(st.range(0)), 1.0);
  const SymTensorField3 f = smooth_phantom(g);
  const AcquisitionConfig cfg = config(g);
  for (auto _ : st)
    benchmark::DoNotOptimize(simulate_acquisition(f, cfg));
  st.counters["threads"] = Exec{}.resolved();
}

struct AxisInput {
  VoxelGrid3 grid;
  std::vector<double> block;
  int rows;
  SinogramGeometry geom;
};

AxisInput axis_input(int n)
{
  const VoxelGrid3 g(n, 1.0);
  const TrtDataSet d = random_data(g);
  return {g, d.component_block(2, 0), d.rows, {d.n_angles, d.cols, d.pitch}};
}

void BM_backproject_reference(benchmark::State& st)
{
  const AxisInput in = axis_input(static_cast<int>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(reference::backproject_axis(in.block, in.rows, in.geom, 2, in.grid));
}

void BM_backproject_parallel(benchmark::State& st)
{
  const AxisInput in = axis_input(static_cast<int>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(backproject_axis(in.block, in.rows, in.geom, 2, in.grid));
  st.counters["threads"] = Exec{}.resolved();
}

void BM_adjoint_reference(benchmark::State& st)
{
  const VoxelGrid3 g(static_cast<int>(st.range(0)), 1.0);
  const TrtDataSet d = random_data(g);
  for (auto _ : st)
    benchmark::DoNotOptimize(reference::trt_adjoint(d, g));
}

void BM_adjoint_parallel(benchmark::State& st)
{
  const VoxelGrid3 g(static_cast<int>(st.range(0)), 1.0);
  const TrtDataSet d = random_data(g);
  for (auto _ : st)
    benchmark::DoNotOptimize(trt_adjoint(d, g));
  st.counters["threads"] = Exec{}.resolved();
}

}  // namespace

BENCHMARK(BM_forward_reference)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_forward_parallel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_backproject_reference)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_backproject_parallel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_adjoint_reference)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_adjoint_parallel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
