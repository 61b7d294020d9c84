#include "star/terrain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "star/error.hpp"
#include "star/parallel.hpp"

namespace star::terrain {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double wrap_degrees(double a) {
  a = std::fmod(a, 360.0);
  if (a < 0.0) a += 360.0;
  return a >= 360.0 ? 0.0 : a;
}

}  // namespace

std::string_view to_string(Model m) { return m == Model::direct ? "direct" : "volume"; }

Model parse_model(std::string_view s) {
  if (s == "direct") return Model::direct;
  if (s == "volume") return Model::volume;
  fail(ErrorKind::parameter, "unknown terrain model '" + std::string(s) + "'");
}

SlopeAspect slope_aspect(const RasterGrid& dem, std::optional<MetersPerDegree> per_degree) {
  require(dem.units() == Units::meters, ErrorKind::unit, "DEM must be in meters");
  double step_x = dem.spec().transform.pixel_w;
  double step_y = dem.spec().transform.pixel_h;
  if (is_geographic_crs(dem.spec().crs_id)) {
    require(per_degree.has_value() && per_degree->x > 0.0 && per_degree->y > 0.0, ErrorKind::parameter,
            "slope on geographic CRS " + dem.spec().crs_id + " needs a configured meters-per-degree pair");
    step_x *= per_degree->x;
    step_y *= per_degree->y;
  }

  SlopeAspect out{RasterGrid(dem.spec(), Units::degrees, 0.0), RasterGrid(dem.spec(), Units::degrees, 0.0)};
  const int w = dem.width();
  const int h = dem.height();
  const auto ok = [&](int x, int y) { return dem.in_bounds(x, y) && dem.valid(x, y); };

  parallel_rows(h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      if (!ok(x, y)) {
        out.slope.invalidate(x, y);
        out.aspect.invalidate(x, y);
        continue;
      }
      int neighbours = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if ((dx != 0 || dy != 0) && ok(x + dx, y + dy)) ++neighbours;
        }
      }
      // Horn weights (1,2,1) across the three rows (for d/dx) or columns (for d/dy).
      constexpr std::array<double, 3> weight = {1.0, 2.0, 1.0};
      double gx_sum = 0.0, gx_w = 0.0, gy_sum = 0.0, gy_w = 0.0;
      for (int k = -1; k <= 1; ++k) {
        const double wk = weight[static_cast<std::size_t>(k + 1)];
        // Row y+k, derivative along x.
        if (ok(x, y + k) || (ok(x - 1, y + k) && ok(x + 1, y + k))) {
          const bool l = ok(x - 1, y + k);
          const bool r = ok(x + 1, y + k);
          if (l && r) {
            gx_sum += wk * (dem.at(x + 1, y + k) - dem.at(x - 1, y + k)) / (2.0 * step_x);
            gx_w += wk;
          } else if (r && ok(x, y + k)) {
            gx_sum += wk * (dem.at(x + 1, y + k) - dem.at(x, y + k)) / step_x;
            gx_w += wk;
          } else if (l && ok(x, y + k)) {
            gx_sum += wk * (dem.at(x, y + k) - dem.at(x - 1, y + k)) / step_x;
            gx_w += wk;
          }
        }
        // Column x+k, derivative along the CRS y axis (rows advance by pixel_h).
        const bool u = ok(x + k, y - 1);
        const bool d = ok(x + k, y + 1);
        if (u && d) {
          gy_sum += wk * (dem.at(x + k, y + 1) - dem.at(x + k, y - 1)) / (2.0 * step_y);
          gy_w += wk;
        } else if (d && ok(x + k, y)) {
          gy_sum += wk * (dem.at(x + k, y + 1) - dem.at(x + k, y)) / step_y;
          gy_w += wk;
        } else if (u && ok(x + k, y)) {
          gy_sum += wk * (dem.at(x + k, y) - dem.at(x + k, y - 1)) / step_y;
          gy_w += wk;
        }
      }
      if (neighbours < 4 || gx_w == 0.0 || gy_w == 0.0) {
        out.slope.invalidate(x, y);
        out.aspect.invalidate(x, y);
        continue;
      }
      const double gx = gx_sum / gx_w;  // dz/d(east)
      const double gy = gy_sum / gy_w;  // dz/d(north)
      out.slope.at(x, y) = std::atan(std::sqrt(gx * gx + gy * gy)) / kDeg;
      out.aspect.at(x, y) = (gx == 0.0 && gy == 0.0) ? 0.0 : wrap_degrees(std::atan2(-gx, -gy) / kDeg);
    }
  });
  return out;
}

double look_azimuth_deg(const SarGeometry& geom) { return wrap_degrees(geom.heading_deg + 90.0); }

LocalIncidence local_incidence(const RasterGrid& dem, const SarGeometry& geom,
                               std::optional<MetersPerDegree> per_degree) {
  require(geom.incidence.size() > 0, ErrorKind::parameter, "local_incidence needs an incidence-angle band");
  require(geom.incidence.units() == Units::degrees, ErrorKind::unit, "incidence band must be in degrees");
  require_co_registered(dem.spec(), geom.incidence.spec(), "local_incidence");
  const SlopeAspect sa = slope_aspect(dem, per_degree);
  const double look = look_azimuth_deg(geom) * kDeg;
  // Horizontal unit vector pointing from the ground toward the sensor.
  const double to_sensor_e = -std::sin(look);
  const double to_sensor_n = -std::cos(look);

  LocalIncidence out{RasterGrid(dem.spec(), Units::degrees, 0.0), RasterGrid(dem.spec(), Units::degrees, 0.0),
                     BinaryMask(dem.spec()), BinaryMask(dem.spec())};
  for (std::size_t i = 0; i < dem.size(); ++i) {
    const double theta = geom.incidence.values()[i];
    if (!sa.slope.valid_at(i) || !geom.incidence.valid_at(i) || !(theta > 0.0 && theta < 90.0)) {
      out.angle.invalidate_at(i);
      out.range_slope.invalidate_at(i);
      out.layover.valid_mask()[i] = 0;
      out.shadow.valid_mask()[i] = 0;
      continue;
    }
    const double slope_deg = sa.slope.values()[i];
    if (slope_deg == 0.0) {
      out.angle.values()[i] = theta;
      out.range_slope.values()[i] = 0.0;
      continue;
    }
    const double s = slope_deg * kDeg;
    const double a = sa.aspect.values()[i] * kDeg;
    const double t = theta * kDeg;
    const double face_e = std::sin(a);
    const double face_n = std::cos(a);
    const double cos_lia =
        std::sin(s) * std::sin(t) * (face_e * to_sensor_e + face_n * to_sensor_n) + std::cos(s) * std::cos(t);
    const double range_slope = std::atan(std::tan(s) * (face_e * to_sensor_e + face_n * to_sensor_n)) / kDeg;
    out.range_slope.values()[i] = range_slope;
    const bool layover = range_slope > theta;
    const bool shadow = cos_lia <= 0.0;
    out.layover.bits()[i] = layover ? 1 : 0;
    out.shadow.bits()[i] = shadow ? 1 : 0;
    if (layover || shadow) {
      out.angle.invalidate_at(i);
      continue;
    }
    out.angle.values()[i] = std::acos(std::clamp(cos_lia, -1.0, 1.0)) / kDeg;
  }
  return out;
}

double direct_factor(double local_incidence_deg, double reference_deg) {
  return std::cos(local_incidence_deg * kDeg) / std::cos(reference_deg * kDeg);
}

double volume_factor(double reference_deg, double range_slope_deg) {
  const double complement = 90.0 - reference_deg;
  return std::tan((complement + range_slope_deg) * kDeg) / std::tan(complement * kDeg);
}

RasterGrid flatten(const RasterGrid& grid, const RasterGrid& dem, const SarGeometry& geom, Model model,
                   std::optional<MetersPerDegree> per_degree) {
  require(grid.units() == Units::linear, ErrorKind::unit, "flatten requires linear-power input");
  require_co_registered(grid.spec(), dem.spec(), "flatten");
  const LocalIncidence lia = local_incidence(dem, geom, per_degree);
  RasterGrid out = grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.valid_at(i)) continue;
    if (!lia.angle.valid_at(i)) {
      out.invalidate_at(i);
      continue;
    }
    const double ref = geom.incidence.values()[i];
    const double factor = model == Model::direct ? direct_factor(lia.angle.values()[i], ref)
                                                 : volume_factor(ref, lia.range_slope.values()[i]);
    if (!(factor > 0.0) || !std::isfinite(factor)) {
      out.invalidate_at(i);
      continue;
    }
    out.values()[i] = grid.values()[i] * factor;
  }
  return out;
}

RasterGrid slope_mask_from_slope(const RasterGrid& grid, const RasterGrid& slope_deg, double max_slope_deg) {
  require_co_registered(grid.spec(), slope_deg.spec(), "slope_mask");
  RasterGrid out = grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!slope_deg.valid_at(i) || slope_deg.values()[i] > max_slope_deg) out.invalidate_at(i);
  }
  return out;
}

RasterGrid slope_mask(const RasterGrid& grid, const RasterGrid& dem, double max_slope_deg,
                      std::optional<MetersPerDegree> per_degree) {
  require_co_registered(grid.spec(), dem.spec(), "slope_mask");
  return slope_mask_from_slope(grid, slope_aspect(dem, per_degree).slope, max_slope_deg);
}

}  // namespace star::terrain
