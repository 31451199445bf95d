// Serial reference versus OpenMP kernel for the three hot loops.
//
//   sqgate_bench --benchmark_filter=Shots
//
// Thread count follows OMP_NUM_THREADS.

#include <numbers>
#include <vector>

#include <benchmark/benchmark.h>

#include "sqgate/metrics.hpp"
#include "sqgate/oracle.hpp"
#include "sqgate/protocol.hpp"

namespace {

using namespace sqgate;

const std::vector<double> kPhases{0.0, std::numbers::pi / 4, std::numbers::pi / 2};

GateConfig headline() { return gate_config_for_target(10.0, SqueezeAxis::amplitude, 12.0); }

void BM_ShotsSerial(benchmark::State& state) {
  const auto cfg = headline();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_gate_shots_serial(cfg, vacuum(1), n, kPhases, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ShotsParallel(benchmark::State& state) {
  const auto cfg = headline();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_gate_shots(cfg, vacuum(1), n, kPhases, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

GaussianState wigner_state() { return run_gate_analytic(headline(), vacuum(1)).output; }

void BM_WignerSerial(benchmark::State& state) {
  const auto st = wigner_state();
  const GridSpec grid{-8, 8, -8, 8, 16.0 / static_cast<double>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(wigner_serial(st, grid));
}

void BM_WignerParallel(benchmark::State& state) {
  const auto st = wigner_state();
  const GridSpec grid{-8, 8, -8, 8, 16.0 / static_cast<double>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(wigner(st, grid));
}

void BM_OverlapSerial(benchmark::State& state) {
  const auto r = run_gate_analytic(headline(), vacuum(1));
  const auto grid = covering_grid(r.target, r.output, 6.0, 0.05 / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(overlap_integral_serial(r.target, r.output, grid));
}

void BM_OverlapParallel(benchmark::State& state) {
  const auto r = run_gate_analytic(headline(), vacuum(1));
  const auto grid = covering_grid(r.target, r.output, 6.0, 0.05 / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(overlap_integral(r.target, r.output, grid));
}

}  // namespace

BENCHMARK(BM_ShotsSerial)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShotsParallel)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WignerSerial)->Arg(320)->Arg(1280)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WignerParallel)->Arg(320)->Arg(1280)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OverlapSerial)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OverlapParallel)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
