#include <cmath>

#include "star/error.hpp"
#include "star/focal.hpp"
#include "star/parallel.hpp"

namespace star {

namespace {

// Coordinates within 1e-9 pixel of an integer snap to it, so identical grids map 1:1.
double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-9 ? r : v;
}

}  // namespace

RasterGrid resample_to(const RasterGrid& grid, const GridSpec& target, ResampleMethod method) {
  validate(target);
  if (grid.spec().crs_id != target.crs_id) {
    fail(ErrorKind::unsupported_projection, "cannot resample from " + grid.spec().crs_id + " to " + target.crs_id +
                                                ": reprojection is not supported, pre-project inputs to one CRS");
  }
  const auto& src = grid.spec().transform;
  const auto& dst = target.transform;
  RasterGrid out(target, grid.units(), 0.0);

  parallel_rows(target.height, [&](int row) {
    // Fractional source row/column of a target pixel centre, in source pixel-centre index space.
    const double v = snap((dst.origin_y - src.origin_y + (row + 0.5) * dst.pixel_h) / src.pixel_h - 0.5);
    for (int col = 0; col < target.width; ++col) {
      const double u = snap((dst.origin_x - src.origin_x + (col + 0.5) * dst.pixel_w) / src.pixel_w - 0.5);
      if (method == ResampleMethod::nearest) {
        const int sx = static_cast<int>(std::floor(u + 0.5));
        const int sy = static_cast<int>(std::floor(v + 0.5));
        if (!grid.in_bounds(sx, sy) || !grid.valid(sx, sy)) {
          out.invalidate(col, row);
        } else {
          out.at(col, row) = grid.at(sx, sy);
        }
        continue;
      }
      const int x0 = static_cast<int>(std::floor(u));
      const int y0 = static_cast<int>(std::floor(v));
      const double fx = u - x0;
      const double fy = v - y0;
      const double wts[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
      const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
      const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
      double acc = 0.0;
      bool ok = true;
      for (int k = 0; k < 4 && ok; ++k) {
        if (wts[k] == 0.0) continue;
        if (!grid.in_bounds(xs[k], ys[k]) || !grid.valid(xs[k], ys[k])) {
          ok = false;
          break;
        }
        acc += wts[k] * grid.at(xs[k], ys[k]);
      }
      if (!ok) {
        out.invalidate(col, row);
      } else {
        out.at(col, row) = acc;
      }
    }
  });
  return out;
}

}  // namespace star
