// Serial reference vs OpenMP path for the two hot kernels.

#include <benchmark/benchmark.h>

#include "rds/family.hpp"
#include "rds/kernels.hpp"

namespace {

using rds::Exec;

void push_points(benchmark::State& state, Exec exec) {
  const auto fam = rds::example1(2, 1, 0.2);
  const auto window = rds::NoiseWindow::generate(fam.noise(), 1, 512);
  std::vector<rds::CirclePoint> pts;
  for (int j = 0; j < state.range(0); ++j) pts.emplace_back(double(j) / double(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rds::kernels::push_points(fam, window, pts, -512, 0, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 512);
}

void orbit_histogram(benchmark::State& state, Exec exec) {
  const auto fam = rds::example3(0.15, 0.1);
  for (auto _ : state)
    benchmark::DoNotOptimize(rds::kernels::orbit_histogram(fam, 7, 16, 1000, state.range(0), 2048, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 16);
}

}  // namespace

BENCHMARK_CAPTURE(push_points, serial, Exec::serial)->Arg(256)->Arg(4096);
BENCHMARK_CAPTURE(push_points, parallel, Exec::parallel)->Arg(256)->Arg(4096);
BENCHMARK_CAPTURE(orbit_histogram, serial, Exec::serial)->Arg(12500);
BENCHMARK_CAPTURE(orbit_histogram, parallel, Exec::parallel)->Arg(12500);

BENCHMARK_MAIN();
