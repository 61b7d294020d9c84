#include <benchmark/benchmark.h>

#include "common.hpp"
#include "star/speckle.hpp"

namespace {

void run(benchmark::State& state, star::speckle::Filter f) {
  const auto g = bench::speckle_field(static_cast<int>(state.range(0)));
  star::speckle::SpeckleParams p;
  p.looks = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(star::speckle::apply(f, g, p));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}

}  // namespace

static void BM_Lee(benchmark::State& s) { run(s, star::speckle::Filter::lee); }
static void BM_RefinedLee(benchmark::State& s) { run(s, star::speckle::Filter::refined_lee); }
static void BM_GammaMap(benchmark::State& s) { run(s, star::speckle::Filter::gamma_map); }
static void BM_LeeSigma(benchmark::State& s) { run(s, star::speckle::Filter::lee_sigma); }

BENCHMARK(BM_Lee)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RefinedLee)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GammaMap)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LeeSigma)->Arg(512)->Unit(benchmark::kMillisecond);
