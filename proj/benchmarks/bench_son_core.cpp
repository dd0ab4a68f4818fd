#include <benchmark/benchmark.h>

#include "sohb/son_core.hpp"

namespace {

void BM_HaarSample(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  sohb::RngStream rng(42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sohb::haar_sample(rng, n));
  }
}

void BM_ProjectToRotation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  sohb::RngStream rng(42);
  sohb::Mat j(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) j(i, k) = rng.normal();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(sohb::project_to_rotation(j));
  }
}

}  // namespace

BENCHMARK(BM_HaarSample)->Arg(3)->Arg(5)->Arg(8);
BENCHMARK(BM_ProjectToRotation)->Arg(3)->Arg(5)->Arg(8);
