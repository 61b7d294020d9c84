#pragma once

#include <optional>
#include <string_view>

#include "star/focal.hpp"
#include "star/raster.hpp"

namespace star::terrain {

enum class Model { direct, volume };

std::string_view to_string(Model m);
Model parse_model(std::string_view s);

struct SlopeAspect {
  RasterGrid slope;   ///< degrees from horizontal
  RasterGrid aspect;  ///< downslope (facing) azimuth, degrees clockwise from north in [0, 360); 0 on flat ground
};

/// Horn 3x3 gradient. Rows missing a neighbour fall back to one-sided differences; a
/// pixel needs a valid centre and at least four valid neighbours.
SlopeAspect slope_aspect(const RasterGrid& dem, std::optional<MetersPerDegree> per_degree = std::nullopt);

struct SarGeometry {
  RasterGrid incidence;  ///< ellipsoid incidence angle, degrees
  double heading_deg = 0.0;
  OrbitPass pass = OrbitPass::ASC;
};

/// Sentinel-1 is right-looking on both passes: look azimuth = heading + 90.
double look_azimuth_deg(const SarGeometry& geom);

struct LocalIncidence {
  RasterGrid angle;        ///< local incidence angle in degrees; layover/shadow invalid
  RasterGrid range_slope;  ///< terrain slope in the range plane, positive when facing the sensor
  BinaryMask layover;
  BinaryMask shadow;
};

LocalIncidence local_incidence(const RasterGrid& dem, const SarGeometry& geom,
                               std::optional<MetersPerDegree> per_degree = std::nullopt);

/// cos(lia) / cos(ref).
double direct_factor(double local_incidence_deg, double reference_deg);
/// tan(90 - ref + range_slope) / tan(90 - ref).
double volume_factor(double reference_deg, double range_slope_deg);

/// Radiometric slope correction of linear backscatter. Layover, shadow and pixels with a
/// non-positive correction factor become invalid.
RasterGrid flatten(const RasterGrid& grid, const RasterGrid& dem, const SarGeometry& geom, Model model,
                   std::optional<MetersPerDegree> per_degree = std::nullopt);

/// Invalidates pixels steeper than max_slope_deg (or with no slope estimate).
RasterGrid slope_mask(const RasterGrid& grid, const RasterGrid& dem, double max_slope_deg,
                      std::optional<MetersPerDegree> per_degree = std::nullopt);
RasterGrid slope_mask_from_slope(const RasterGrid& grid, const RasterGrid& slope_deg, double max_slope_deg);

}  // namespace star::terrain
