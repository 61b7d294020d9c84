#pragma once

#include <random>

#include "star/raster.hpp"

namespace bench {

inline star::GridSpec spec(int n) { return {n, n, {500000.0, 4000000.0, 10.0, -10.0}, "EPSG:32632"}; }

// Unit-mean exponential speckle over a linear field.
inline star::RasterGrid speckle_field(int n, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> g(1.0, 1.0);
  star::RasterGrid out(spec(n), star::Units::linear, 0.0);
  for (auto& v : out.values()) v = 0.1 * g(rng);
  return out;
}

inline star::BinaryMask random_mask(int n, double p, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution b(p);
  star::BinaryMask m(spec(n));
  for (auto& v : m.bits()) v = b(rng) ? 1 : 0;
  return m;
}

}  // namespace bench
