#include <benchmark/benchmark.h>

#include "common.hpp"
#include "star/temporal.hpp"

static void BM_CompositeMedian(benchmark::State& state) {
  std::vector<star::StackLayer> layers;
  for (int k = 0; k < state.range(0); ++k) {
    star::StackLayer l;
    l.grid = bench::speckle_field(512, static_cast<std::uint64_t>(k + 1));
    l.timestamp = star::Timestamp(std::chrono::seconds(86400L * k));
    layers.push_back(std::move(l));
  }
  const star::TimeStack stack(std::move(layers));
  for (auto _ : state) benchmark::DoNotOptimize(star::temporal::composite(stack, star::temporal::Stat::median));
}
BENCHMARK(BM_CompositeMedian)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);
