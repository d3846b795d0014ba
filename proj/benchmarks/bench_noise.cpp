#include "socv/noise.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_PhiloxBlock(benchmark::State& state) {
  std::array<uint32_t, 4> ctr = {1, 2, 3, 4};
  for (auto _ : state) {
    ctr = socv::philox4x32({42u, 7u}, ctr);
    benchmark::DoNotOptimize(ctr);
  }
}
BENCHMARK(BM_PhiloxBlock);

void BM_CounterGaussian(benchmark::State& state) {
  int64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(socv::counter_gaussian(42, 0, 0, i++));
  }
}
BENCHMARK(BM_CounterGaussian);

void BM_EnsembleBuild(benchmark::State& state) {
  const int paths = static_cast<int>(state.range(0));
  for (auto _ : state) {
    socv::NoiseEnsemble noise(paths, 64, 2, 1.0, 42);
    benchmark::DoNotOptimize(noise.increment(paths - 1, 63, 1));
  }
  state.SetItemsProcessed(state.iterations() * paths * 64 * 2);
}
BENCHMARK(BM_EnsembleBuild)->Arg(1024)->Arg(8192);

}  // namespace
