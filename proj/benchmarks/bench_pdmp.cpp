#include <benchmark/benchmark.h>

#include "sohb/pdmp.hpp"

namespace {

sohb::SimParams bench_params(bool homogeneous) {
  sohb::SimParams p;
  p.N = 500;
  p.n = 3;
  p.c0 = 1.0;
  p.nu = 1.0;
  p.kappa = 2.0;
  p.L = 10.0;
  p.R = homogeneous ? 20.0 : 1.0;
  p.T_end = 2.0;
  p.seed = 9;
  return p;
}

void BM_PdmpRun(benchmark::State& state) {
  const auto params = bench_params(state.range(0) != 0);
  for (auto _ : state) {
    sohb::RunStats stats;
    auto ensemble = sohb::run(params, nullptr, &stats);
    benchmark::DoNotOptimize(stats.total_jumps);
    benchmark::DoNotOptimize(ensemble.sim_time());
  }
}

}  // namespace

BENCHMARK(BM_PdmpRun)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
