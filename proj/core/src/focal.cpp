#include "star/focal.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "star/error.hpp"
#include "star/parallel.hpp"

namespace star {

Moments moments(std::span<const double> sample) {
  Moments m;
  m.count = static_cast<int>(sample.size());
  if (sample.empty()) return m;
  const double anchor = sample.front();
  double offset = 0.0;
  for (double v : sample) offset += v - anchor;
  m.mean = anchor + offset / static_cast<double>(sample.size());
  double ss = 0.0;
  for (double v : sample) {
    const double d = v - m.mean;
    ss += d * d;
  }
  m.variance = ss / static_cast<double>(sample.size());
  return m;
}

FocalStats focal_stats(const RasterGrid& grid, int radius) {
  require(grid.units() == Units::linear, ErrorKind::unit, "focal_stats requires linear-power input");
  require(radius >= 1, ErrorKind::parameter, "focal_stats radius must be >= 1");
  require(2 * radius <= std::min(grid.width(), grid.height()), ErrorKind::parameter,
          "focal_stats radius " + std::to_string(radius) + " exceeds half the grid size");

  FocalStats out{RasterGrid(grid.spec(), grid.units(), 0.0), RasterGrid(grid.spec(), grid.units(), 0.0)};
  const int w = grid.width();
  const int h = grid.height();
  parallel_rows(h, [&](int y) {
    std::vector<double> window;
    window.reserve(static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1)));
    for (int x = 0; x < w; ++x) {
      window.clear();
      if (grid.valid(x, y)) {
        for (int yy = std::max(0, y - radius); yy <= std::min(h - 1, y + radius); ++yy) {
          for (int xx = std::max(0, x - radius); xx <= std::min(w - 1, x + radius); ++xx) {
            if (grid.valid(xx, yy)) window.push_back(grid.at(xx, yy));
          }
        }
      }
      if (window.size() < 2) {
        out.mean.invalidate(x, y);
        out.variance.invalidate(x, y);
        continue;
      }
      const Moments m = moments(window);
      out.mean.at(x, y) = m.mean;
      out.variance.at(x, y) = m.variance;
    }
  });
  return out;
}

RasterGrid convolve(const RasterGrid& grid, const Kernel& kernel) {
  require(grid.units() == Units::dB || grid.units() == Units::linear, ErrorKind::unit,
          "convolve requires dB or linear input");
  RasterGrid out(grid.spec(), grid.units(), 0.0);
  const int w = grid.width();
  const int h = grid.height();
  const int r = kernel.radius();
  parallel_rows(h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      if (!grid.valid(x, y)) {
        out.invalidate(x, y);
        continue;
      }
      // Weighted offsets from the centre value keep constant fields exact.
      const double anchor = grid.at(x, y);
      double weight_sum = 0.0;
      double acc = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= h) continue;
        for (int dx = -r; dx <= r; ++dx) {
          const int xx = x + dx;
          if (xx < 0 || xx >= w || !grid.valid(xx, yy)) continue;
          const double wt = kernel.weight(dx, dy);
          if (wt == 0.0) continue;
          weight_sum += wt;
          acc += wt * (grid.at(xx, yy) - anchor);
        }
      }
      if (weight_sum == 0.0) {
        out.invalidate(x, y);
        continue;
      }
      const double scale = kernel.normalized() ? 1.0 : kernel.sum();
      out.at(x, y) = scale == 1.0 ? anchor + acc / weight_sum : scale * (anchor + acc / weight_sum);
    }
  });
  return out;
}

RasterGrid focal_median(const RasterGrid& grid, const Kernel& kernel) {
  RasterGrid out(grid.spec(), grid.units(), 0.0);
  const int w = grid.width();
  const int h = grid.height();
  const int r = kernel.radius();
  parallel_rows(h, [&](int y) {
    std::vector<double> window;
    for (int x = 0; x < w; ++x) {
      if (!grid.valid(x, y)) {
        out.invalidate(x, y);
        continue;
      }
      window.clear();
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          const int xx = x + dx;
          const int yy = y + dy;
          if (!grid.in_bounds(xx, yy) || !grid.valid(xx, yy) || kernel.weight(dx, dy) == 0.0) continue;
          window.push_back(grid.at(xx, yy));
        }
      }
      const auto mid = window.begin() + static_cast<std::ptrdiff_t>((window.size() - 1) / 2);
      std::nth_element(window.begin(), mid, window.end());
      out.at(x, y) = *mid;
    }
  });
  return out;
}

bool is_geographic_crs(std::string_view crs_id) {
  return crs_id == "EPSG:4326" || crs_id == "EPSG:4269" || crs_id == "EPSG:4258" || crs_id == "EPSG:4283" ||
         crs_id == "OGC:CRS84";
}

double pixel_area_m2(const GridSpec& spec, std::optional<MetersPerDegree> per_degree) {
  const double pw = std::abs(spec.transform.pixel_w);
  const double ph = std::abs(spec.transform.pixel_h);
  if (!is_geographic_crs(spec.crs_id)) return pw * ph;
  require(per_degree.has_value() && per_degree->x > 0.0 && per_degree->y > 0.0, ErrorKind::parameter,
          "pixel area on geographic CRS " + spec.crs_id + " needs a configured meters-per-degree pair");
  return pw * per_degree->x * ph * per_degree->y;
}

}  // namespace star
