#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "star/error.hpp"
#include "star/focal.hpp"
#include "star/speckle.hpp"

namespace {

using namespace star;
using namespace star::speckle;

RasterGrid speckled(int w, int h, double truth, double looks, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> g(looks, 1.0 / looks);
  RasterGrid out(oracle::metric_spec(w, h), Units::linear, 0.0);
  for (auto& v : out.values()) v = truth * g(rng);
  return out;
}

double mean_of(const RasterGrid& g) {
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.valid_at(i)) continue;
    s += g.values()[i];
    ++n;
  }
  return s / static_cast<double>(n);
}

double variance_of(const RasterGrid& g) {
  const double m = mean_of(g);
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.valid_at(i)) continue;
    s += (g.values()[i] - m) * (g.values()[i] - m);
    ++n;
  }
  return s / static_cast<double>(n);
}

SpeckleParams params(double looks, int radius) {
  SpeckleParams p;
  p.looks = looks;
  p.radius = radius;
  return p;
}

TEST(LeeWeight, ZeroVarianceKeepsMean) {
  EXPECT_EQ(lee_weight(3.0, 0.0, 0.25), 0.0);
  EXPECT_EQ(lee_estimate(9.0, 3.0, 0.0, 0.25), 3.0);
}

TEST(Lee, OneToNineWithSingleLook) {
  const RasterGrid g(oracle::metric_spec(3, 3), Units::linear, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  const auto out = lee(g, params(1.0, 1));
  EXPECT_DOUBLE_EQ(out.at(1, 1), 5.0);
}

TEST(Lee, StrongEdgeFollowsScalarOracle) {
  RasterGrid g(oracle::metric_spec(12, 6), Units::linear, 1.0);
  for (int y = 0; y < 6; ++y)
    for (int x = 6; x < 12; ++x) g.at(x, y) = 1e4;
  const auto out = lee(g, params(4.0, 1));
  const auto s = oracle::focal_stats(g, 1);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 12; ++x) {
      const double want = oracle::lee_scalar(g.at(x, y), s.mean.at(x, y), s.variance.at(x, y), 4.0);
      EXPECT_NEAR(out.at(x, y), want, 1e-9 * want);
    }
  }
  // Weight tends to 1/(1+Cu²) at the edge, so the bright side is nearly untouched.
  EXPECT_GT(out.at(6, 3), 0.75 * 1e4);
}

TEST(Lee, ConstantFieldUnchanged) {
  const RasterGrid g(oracle::metric_spec(10, 10), Units::linear, 0.3);
  for (auto f : {Filter::boxcar, Filter::lee, Filter::refined_lee, Filter::gamma_map, Filter::lee_sigma}) {
    const auto out = apply(f, g, params(4.4, 2));
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(out.values()[i], 0.3) << to_string(f);
  }
}

TEST(Boxcar, ImpulseSpreadsOverFootprint) {
  RasterGrid g(oracle::metric_spec(7, 7), Units::linear, 0.0);
  g.at(3, 3) = 9.0;
  const auto out = boxcar(g, params(1.0, 1));
  EXPECT_DOUBLE_EQ(out.at(3, 3), 1.0);
  EXPECT_DOUBLE_EQ(out.at(2, 4), 1.0);
  EXPECT_DOUBLE_EQ(out.at(0, 0), 0.0);
}

TEST(GammaMap, Branches) {
  EXPECT_EQ(gamma_map_class(5.0, 0.0, 4.0), PixelClass::Homogeneous);
  EXPECT_EQ(gamma_map_estimate(9.0, 5.0, 0.0, 4.0), 5.0);
  // Ci = 1 >= sqrt(2)/2.
  EXPECT_EQ(gamma_map_class(5.0, 25.0, 4.0), PixelClass::PointTarget);
  EXPECT_EQ(gamma_map_estimate(9.0, 5.0, 25.0, 4.0), 9.0);
}

TEST(GammaMap, MidBandMatchesQuadraticRoot) {
  // Cu = 0.5 and Ci = 0.6 put the window between the two class limits.
  const double v = (0.6 * 5.0) * (0.6 * 5.0);
  ASSERT_EQ(gamma_map_class(5.0, v, 4.0), PixelClass::Heterogeneous);
  const double want = oracle::gamma_map_root(9.0, 5.0, v, 4.0);
  EXPECT_NEAR(gamma_map_estimate(9.0, 5.0, v, 4.0), want, 1e-12);
  EXPECT_GT(want, 5.0);
  EXPECT_LT(want, 9.0);
}

TEST(GammaMap, ZeroMeanIsInvalid) {
  const RasterGrid g(oracle::metric_spec(4, 4), Units::linear, 0.0);
  const auto out = gamma_map(g, params(4.0, 1));
  EXPECT_FALSE(out.valid(1, 1));
}

TEST(RefinedLee, RandomGridMatchesStraightLineOracle) {
  const auto g = oracle::random_grid(32, 32, Units::linear, 0.01, 2.0, 77, 0.05);
  const auto got = refined_lee(g, params(3.0, 1));
  const auto want = oracle::refined_lee(g, 3.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    ASSERT_EQ(got.valid_at(i), want.valid_at(i)) << i;
    if (want.valid_at(i)) {
      EXPECT_EQ(got.values()[i], want.values()[i]) << i;
    }
  }
}

TEST(RefinedLee, NoiseFreeStepIsPreservedAwayFromBorders) {
  RasterGrid g(oracle::metric_spec(32, 32), Units::linear, 1.0);
  for (int y = 0; y < 32; ++y)
    for (int x = 16; x < 32; ++x) g.at(x, y) = 100.0;
  const auto out = refined_lee(g, params(2.0, 1));
  for (int y = 3; y < 29; ++y) {
    for (int x = 3; x < 29; ++x) EXPECT_EQ(out.at(x, y), g.at(x, y)) << x << "," << y;
  }
  const auto box = boxcar(g, params(2.0, 1));
  EXPECT_GT(box.at(15, 10), 1.0);
}

TEST(RefinedLee, TooSmallGridRejected) {
  const RasterGrid g(oracle::metric_spec(5, 5), Units::linear, 1.0);
  EXPECT_THROW(refined_lee(g, params(2.0, 1)), Error);
}

TEST(LeeSigma, BrightClusterPreserved) {
  auto g = speckled(32, 32, 1.0, 4.0, 5);
  for (int y = 10; y < 13; ++y)
    for (int x = 10; x < 13; ++x) g.at(x, y) = 1000.0;
  const auto out = lee_sigma(g, params(4.0, 2));
  EXPECT_EQ(out.at(11, 11), 1000.0);
  EXPECT_EQ(out.at(11, 10), 1000.0);
}

TEST(LeeSigma, WideWindowAndHighXiOverFilterThinLine) {
  auto g = speckled(64, 64, 1.0, 4.0, 9);
  for (int y = 0; y < 64; ++y) g.at(32, y) *= 5.0;
  const auto contrast = [&](const RasterGrid& f) {
    double line = 0.0;
    double bg = 0.0;
    int nb = 0;
    for (int y = 8; y < 56; ++y) {
      line += f.at(32, y);
      for (int x = 8; x < 24; ++x, ++nb) bg += f.at(x, y);
    }
    return (line / 48.0) / (bg / nb);
  };
  SpeckleParams wide = params(4.0, 4);
  wide.sigma_xi = 0.9;
  SpeckleParams narrow = params(4.0, 1);
  narrow.sigma_xi = 0.5;
  const double c_wide = contrast(lee_sigma(g, wide));
  const double c_narrow = contrast(lee_sigma(g, narrow));
  EXPECT_LT(c_wide, c_narrow);
}

TEST(LeeSigma, QuantileOfCoverage) {
  EXPECT_NEAR(two_sided_normal_quantile(0.9), 1.6448536269514722, 1e-12);
  EXPECT_NEAR(two_sided_normal_quantile(0.5), 0.6744897501960817, 1e-12);
}

TimeStack stack_of(std::vector<RasterGrid> layers) {
  std::vector<StackLayer> out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    StackLayer l;
    l.grid = std::move(layers[i]);
    l.timestamp = Timestamp(std::chrono::seconds(86400 * static_cast<long>(i)));
    out.push_back(std::move(l));
  }
  return TimeStack(std::move(out));
}

TEST(Multitemporal, SingleLayerPassesThrough) {
  const auto g = speckled(16, 16, 2.0, 1.0, 1);
  const auto out = multitemporal(stack_of({g}), Filter::lee, params(1.0, 1));
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(out[0].grid.values()[i], g.values()[i]);
}

TEST(Multitemporal, IdenticalLayersReproduceTheLayer) {
  const auto g = speckled(16, 16, 2.0, 1.0, 2);
  const auto out = multitemporal(stack_of({g, g, g, g}), Filter::lee, params(1.0, 1));
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_NEAR(out[k].grid.values()[i], g.values()[i], 1e-12 * g.values()[i]);
    }
  }
}

TEST(Multitemporal, ReducesVarianceOfEachLayer) {
  std::vector<RasterGrid> layers;
  for (std::uint64_t s = 0; s < 8; ++s) layers.push_back(speckled(64, 64, 10.0, 1.0, 100 + s));
  const auto out = multitemporal(stack_of(layers), Filter::lee, params(1.0, 1));
  for (std::size_t k = 0; k < layers.size(); ++k) EXPECT_LT(variance_of(out[k].grid), 0.5 * variance_of(layers[k]));
}

TEST(Multitemporal, EmptyStackAndBadBase) {
  EXPECT_THROW(multitemporal(TimeStack{}, Filter::lee, {}), Error);
  const auto g = speckled(8, 8, 1.0, 1.0, 3);
  EXPECT_THROW(multitemporal(stack_of({g}), Filter::multitemporal, {}), Error);
}

TEST(Params, Validation) {
  SpeckleParams p;
  p.looks = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.sigma_xi = 1.0;
  EXPECT_THROW(p.validate(), Error);
  EXPECT_THROW(parse_filter("median"), Error);
  EXPECT_EQ(parse_filter("refined_lee"), Filter::refined_lee);
}

}  // namespace
