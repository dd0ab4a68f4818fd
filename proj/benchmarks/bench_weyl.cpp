#include <benchmark/benchmark.h>

#include <cmath>

#include "sohb/weyl.hpp"

namespace {

void BM_IntegrateClassFunction(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const double kappa = 2.0;
  for (auto _ : state) {
    const double z = sohb::integrate_class_function(
        n, [&](const sohb::TorusPoint& th) { return std::exp(kappa * sohb::c_fn(n, 1, th)); },
        m);
    benchmark::DoNotOptimize(z);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(std::pow(m, n / 2)));
}

}  // namespace

BENCHMARK(BM_IntegrateClassFunction)
    ->Args({3, 256})
    ->Args({5, 64})
    ->Args({7, 32})
    ->Args({8, 16})
    ->Unit(benchmark::kMillisecond);
