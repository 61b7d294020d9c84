#include <benchmark/benchmark.h>

#include <random>

#include "common.hpp"
#include "star/floodmap.hpp"

static void BM_Otsu(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> c(0, 1000);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(state.range(0)));
  for (auto& v : counts) v = static_cast<std::uint64_t>(c(rng));
  const star::flood::Histogram h(star::flood::Histogram::uniform(-30.0, 15.0, static_cast<int>(counts.size())).edges(),
                                 counts);
  for (auto _ : state) benchmark::DoNotOptimize(star::flood::otsu(h));
}
BENCHMARK(BM_Otsu)->Arg(256)->Arg(4096);

static void BM_Chessboard(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> land(-8.0, 1.5);
  std::normal_distribution<double> water(-21.0, 1.5);
  star::RasterGrid g(bench::spec(1024), star::Units::dB, 0.0);
  for (int y = 0; y < 1024; ++y)
    for (int x = 0; x < 1024; ++x) g.at(x, y) = (x + y < 900) ? water(rng) : land(rng);
  for (auto _ : state) benchmark::DoNotOptimize(star::flood::chessboard_otsu(g, {}));
}
BENCHMARK(BM_Chessboard)->Unit(benchmark::kMillisecond);
