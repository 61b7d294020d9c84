#include <benchmark/benchmark.h>

#include "common.hpp"
#include "star/objects.hpp"

static void BM_ConnectedPixelCount(benchmark::State& state) {
  const auto m = bench::random_mask(static_cast<int>(state.range(0)), 0.55);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        star::objects::connected_pixel_count(m, star::objects::Connectivity::eight, star::objects::kUnboundedCount));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.size()));
}
BENCHMARK(BM_ConnectedPixelCount)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_FilterMinSize(benchmark::State& state) {
  const auto m = bench::random_mask(1024, 0.4);
  for (auto _ : state)
    benchmark::DoNotOptimize(star::objects::filter_min_size(m, star::objects::Connectivity::four, 8));
}
BENCHMARK(BM_FilterMinSize)->Unit(benchmark::kMillisecond);
