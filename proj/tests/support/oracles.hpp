#pragma once

// Brute-force reference implementations. They share only the data types with the library
// and are written for clarity rather than speed.

#include <cstdint>
#include <random>
#include <vector>

#include "star/floodmap.hpp"
#include "star/raster.hpp"
#include "star/speckle.hpp"
#include "star/temporal.hpp"

namespace oracle {

using star::BinaryMask;
using star::GridSpec;
using star::Kernel;
using star::RasterGrid;

GridSpec metric_spec(int w, int h, double pixel = 10.0);

/// Uniform values in [lo, hi); each pixel invalid with probability hole_p.
RasterGrid random_grid(int w, int h, star::Units units, double lo, double hi, std::uint64_t seed,
                       double hole_p = 0.0);
BinaryMask random_mask(int w, int h, double p_on, std::uint64_t seed);

struct Stats {
  RasterGrid mean;
  RasterGrid variance;
};
/// Sum / count and sum of squared deviations / count per window.
Stats focal_stats(const RasterGrid& g, int r);

/// Direct Σ w·v / Σ w over valid, in-bounds, non-zero-weight taps; invalid at invalid centres.
RasterGrid convolve(const RasterGrid& g, const Kernel& k);

/// Interpolates the source at fractional pixel coordinates (centre-based).
double bilinear_at(const RasterGrid& g, double col, double row, bool& ok);

double lee_scalar(double p, double m, double v, double looks);
/// Solves the Gamma-MAP quadratic directly (no class switch, no clamp).
double gamma_map_root(double p, double m, double v, double looks);

/// Literal per-pixel Refined Lee: sub-means, 4 gradients, side choice, half-window, MMSE.
RasterGrid refined_lee(const RasterGrid& g, double looks);

/// Component size at every foreground pixel by recursive flood fill; 0 elsewhere.
std::vector<int> component_sizes(const BinaryMask& m, bool eight);

/// Per-pixel sort of the valid layer values.
RasterGrid composite(const star::TimeStack& s, star::temporal::Stat stat);

struct OtsuPick {
  int cut = 0;
  double threshold = 0.0;
  double sigma_b = -1.0;
};
/// Scans every cut and recomputes both classes from scratch.
OtsuPick otsu(const star::flood::Histogram& h);

/// Classic 3x3 Horn gradient (interior pixels) returning slope and downslope aspect in degrees.
void horn(const RasterGrid& dem, int x, int y, double& slope_deg, double& aspect_deg);

struct FloodCounts {
  std::uint64_t pre = 0;
  std::uint64_t during = 0;
  std::uint64_t flood = 0;
};
FloodCounts set_difference(const BinaryMask& pre, const BinaryMask& during);

}  // namespace oracle
