#include <benchmark/benchmark.h>

#include "common.hpp"
#include "star/focal.hpp"

static void BM_FocalStats(benchmark::State& state) {
  const auto g = bench::speckle_field(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(star::focal_stats(g, 2));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_FocalStats)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_ConvolveCircle(benchmark::State& state) {
  const auto g = bench::speckle_field(512);
  const auto k = star::Kernel::circle(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(star::convolve(g, k));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_ConvolveCircle)->Arg(1)->Arg(3)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
