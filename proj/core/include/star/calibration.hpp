#pragma once

#include "star/raster.hpp"

namespace star::calib {

/// Accepted ellipsoid incidence band; 0 < min < max < 90.
struct AngleRange {
  double min_deg = 31.0;
  double max_deg = 46.0;

  void validate() const;
};

/// Accepted backscatter band in dB.
struct DbRange {
  double min_db = -30.0;
  double max_db = 15.0;

  void validate() const;
};

/// 10*log10(x); non-positive pixels become invalid.
RasterGrid to_db(const RasterGrid& grid);

/// 10^(x/10).
RasterGrid to_linear(const RasterGrid& grid);

/// Invalidates pixels whose incidence angle is outside `range` or invalid. Kept values
/// pass through untouched.
RasterGrid mask_border_angle(const RasterGrid& grid, const RasterGrid& angle, const AngleRange& range);

/// Invalidates dB pixels outside [min_db, max_db].
RasterGrid mask_extremes(const RasterGrid& grid, const DbRange& range);

}  // namespace star::calib
