#pragma once

#include <limits>
#include <string_view>
#include <vector>

#include "star/raster.hpp"

namespace star::objects {

enum class Connectivity { four, eight };

std::string_view to_string(Connectivity c);
Connectivity parse_connectivity(std::string_view s);

enum class SmoothMode { mean, median };

std::string_view to_string(SmoothMode m);
SmoothMode parse_smooth_mode(std::string_view s);

inline constexpr int kDefaultMaxCount = 1024;
inline constexpr int kUnboundedCount = std::numeric_limits<int>::max();

/// Low-pass smoothing: normalized convolution (mean) or focal median over the kernel footprint.
RasterGrid smooth(const RasterGrid& grid, const Kernel& kernel, SmoothMode mode = SmoothMode::mean);

/// Size of each foreground pixel's connected component, saturated at max_count. Background
/// and invalid pixels get 0; invalid pixels stay invalid.
RasterGrid connected_pixel_count(const BinaryMask& mask, Connectivity conn, int max_count = kDefaultMaxCount);

/// Component labels (1-based, in raster scan order of first pixel) and their sizes.
struct Labeling {
  std::vector<int> labels;  ///< 0 for background
  std::vector<std::size_t> sizes;  ///< sizes[label - 1]
};
Labeling label_components(const BinaryMask& mask, Connectivity conn);

/// Clears components smaller than min_pixels.
BinaryMask filter_min_size(const BinaryMask& mask, Connectivity conn, int min_pixels);

}  // namespace star::objects
