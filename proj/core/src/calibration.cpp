#include "star/calibration.hpp"

#include <cmath>

#include "star/error.hpp"

namespace star::calib {

void AngleRange::validate() const {
  require(min_deg > 0.0 && min_deg < max_deg && max_deg < 90.0, ErrorKind::parameter,
          "angle range must satisfy 0 < min < max < 90");
}

void DbRange::validate() const {
  require(min_db < max_db, ErrorKind::parameter, "dB range must satisfy min < max");
}

RasterGrid to_db(const RasterGrid& grid) {
  require(grid.units() == Units::linear, ErrorKind::unit, "to_db requires linear input");
  RasterGrid out = grid;
  out.set_units(Units::dB);
  auto vals = out.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (!out.valid_at(i)) continue;
    if (vals[i] <= 0.0) {
      out.invalidate_at(i);
      vals[i] = 0.0;
      continue;
    }
    vals[i] = 10.0 * std::log10(vals[i]);
  }
  return out;
}

RasterGrid to_linear(const RasterGrid& grid) {
  require(grid.units() == Units::dB, ErrorKind::unit, "to_linear requires dB input");
  RasterGrid out = grid;
  out.set_units(Units::linear);
  auto vals = out.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    vals[i] = out.valid_at(i) ? std::pow(10.0, vals[i] / 10.0) : 0.0;
  }
  return out;
}

RasterGrid mask_border_angle(const RasterGrid& grid, const RasterGrid& angle, const AngleRange& range) {
  range.validate();
  require(angle.units() == Units::degrees, ErrorKind::unit, "angle band must be in degrees");
  require_co_registered(grid.spec(), angle.spec(), "mask_border_angle");
  RasterGrid out = grid;
  const auto a = angle.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!angle.valid_at(i) || a[i] < range.min_deg || a[i] > range.max_deg) out.invalidate_at(i);
  }
  return out;
}

RasterGrid mask_extremes(const RasterGrid& grid, const DbRange& range) {
  range.validate();
  require(grid.units() == Units::dB, ErrorKind::unit, "mask_extremes requires dB input");
  RasterGrid out = grid;
  const auto v = grid.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < range.min_db || v[i] > range.max_db) out.invalidate_at(i);
  }
  return out;
}

}  // namespace star::calib
