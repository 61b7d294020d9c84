#pragma once

#include <string_view>
#include <vector>

#include "star/raster.hpp"

namespace star::temporal {

enum class Stat { mean, median, min, max };

std::string_view to_string(Stat s);
Stat parse_stat(std::string_view s);

/// Resamples every layer onto `target` and sorts by timestamp (stable). Layers already on
/// the target grid pass through untouched; others are resampled bilinearly.
TimeStack align_stack(std::vector<StackLayer> layers, const GridSpec& target);

/// Per-pixel statistic over the valid layer values. A pixel is invalid only when no layer
/// is valid there. The median of an even count is the lower median.
RasterGrid composite(const TimeStack& stack, Stat stat);

/// Composites ascending and descending layers separately, then averages the passes that
/// are available at each pixel.
RasterGrid composite_per_pass(const TimeStack& stack, Stat stat);

enum class Combo { sum, diff, ratio, rvi };

std::string_view to_string(Combo c);
Combo parse_combo(std::string_view s);

/// sum = vv+vh, diff = vv-vh, ratio = vh/vv, rvi = 4 vh / (vv+vh), on linear inputs.
RasterGrid band_combine(const RasterGrid& vv, const RasterGrid& vh, Combo combo);

}  // namespace star::temporal
