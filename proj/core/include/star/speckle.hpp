#pragma once

#include <string_view>

#include "star/raster.hpp"

namespace star::speckle {

enum class Filter { boxcar, lee, refined_lee, gamma_map, lee_sigma, multitemporal };

std::string_view to_string(Filter f);
Filter parse_filter(std::string_view name);

struct SpeckleParams {
  /// Equivalent number of looks L; speckle coefficient of variation Cu = 1/sqrt(L).
  double looks = 4.4;
  int radius = 1;
  /// Lee-sigma coverage; the sigma band is x̂(1 ± xi·Cu·k) with k the two-sided normal quantile of xi.
  double sigma_xi = 0.9;
  double target_percentile = 98.0;
  int target_min_neighbors = 5;

  void validate() const;
  double cu2() const { return 1.0 / looks; }
};

enum class PixelClass { Homogeneous, Heterogeneous, PointTarget };

/// Lee MMSE weight W = clamp(max(0, (v - m²Cu²)/(1+Cu²)) / v, 0, 1), and 0 for v <= 0.
double lee_weight(double mean, double variance, double cu2);

/// m + W (p - m).
double lee_estimate(double pixel, double mean, double variance, double cu2);

/// Classifies a window by its coefficient of variation against Cu and sqrt(2)·Cu.
PixelClass gamma_map_class(double mean, double variance, double looks);

/// Gamma-MAP estimate for one pixel from its window statistics (mean must be > 0).
double gamma_map_estimate(double pixel, double mean, double variance, double looks);

/// Two-sided standard-normal quantile: k such that P(|Z| <= k) = coverage.
double two_sided_normal_quantile(double coverage);

RasterGrid boxcar(const RasterGrid& grid, const SpeckleParams& params);
RasterGrid lee(const RasterGrid& grid, const SpeckleParams& params);

/// 7x7 edge-aligned Lee filter. Gradient direction comes from the 3x3 grid of 3x3
/// sub-window means; the MMSE estimate uses the directional half-window on the side
/// the centre pixel resembles. Falls back to the 3x3 Lee prior near borders or when
/// fewer than three directional pixels are valid.
RasterGrid refined_lee(const RasterGrid& grid, const SpeckleParams& params);

RasterGrid gamma_map(const RasterGrid& grid, const SpeckleParams& params);

/// Lee sigma filter with point-target preservation (see SpeckleParams).
RasterGrid lee_sigma(const RasterGrid& grid, const SpeckleParams& params);

/// Runs a single-image filter by name. `multitemporal` is rejected here.
RasterGrid apply(Filter filter, const RasterGrid& grid, const SpeckleParams& params);

/// out_k = base_k / N * sum_j layer_j / base_j, where base_j = base(layer_j).
TimeStack multitemporal(const TimeStack& stack, Filter base, const SpeckleParams& params);

}  // namespace star::speckle
