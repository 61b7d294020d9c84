#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "star/raster.hpp"

namespace star {

/// Population mean/variance of a sample. The mean is accumulated as offsets from the
/// first sample, so a constant sample returns that constant exactly with zero variance.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  int count = 0;
};

Moments moments(std::span<const double> sample);

struct FocalStats {
  RasterGrid mean;
  RasterGrid variance;
};

/// Mean and population variance over the (2r+1)^2 window, restricted to valid in-bounds
/// pixels. A pixel is valid iff its centre is valid and at least two window pixels are.
FocalStats focal_stats(const RasterGrid& grid, int radius);

/// Weighted sum over valid in-bounds pixels with the weights renormalized to the valid
/// subset (shrink-to-valid edges). Output is invalid where the centre is invalid or no
/// weight falls on a valid pixel.
RasterGrid convolve(const RasterGrid& grid, const Kernel& kernel);

/// Lower median of the valid pixels under the kernel's non-zero footprint.
RasterGrid focal_median(const RasterGrid& grid, const Kernel& kernel);

enum class ResampleMethod { nearest, bilinear };

/// Resamples onto `target` (same CRS only). Nearest keeps the source value set; bilinear
/// output is invalid where any source pixel with non-zero weight is invalid or out of bounds.
RasterGrid resample_to(const RasterGrid& grid, const GridSpec& target, ResampleMethod method);

/// Conversion used for pixel areas on geographic (degree) grids.
struct MetersPerDegree {
  double x = 0.0;
  double y = 0.0;
};

bool is_geographic_crs(std::string_view crs_id);

/// |pixel_w * pixel_h| in square metres. Geographic grids need an explicit conversion.
double pixel_area_m2(const GridSpec& spec, std::optional<MetersPerDegree> per_degree = std::nullopt);
inline double pixel_area_m2(const RasterGrid& grid, std::optional<MetersPerDegree> per_degree = std::nullopt) {
  return pixel_area_m2(grid.spec(), per_degree);
}

}  // namespace star
