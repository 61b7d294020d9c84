#include "star/speckle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "star/error.hpp"
#include "star/focal.hpp"
#include "star/parallel.hpp"

namespace star::speckle {

std::string_view to_string(Filter f) {
  switch (f) {
    case Filter::boxcar: return "boxcar";
    case Filter::lee: return "lee";
    case Filter::refined_lee: return "refined_lee";
    case Filter::gamma_map: return "gamma_map";
    case Filter::lee_sigma: return "lee_sigma";
    case Filter::multitemporal: return "multitemporal";
  }
  return "boxcar";
}

Filter parse_filter(std::string_view name) {
  for (auto f : {Filter::boxcar, Filter::lee, Filter::refined_lee, Filter::gamma_map, Filter::lee_sigma,
                 Filter::multitemporal}) {
    if (to_string(f) == name) return f;
  }
  fail(ErrorKind::parameter, "unknown speckle filter '" + std::string(name) + "'");
}

void SpeckleParams::validate() const {
  require(looks > 0.0, ErrorKind::parameter, "looks must be positive");
  require(radius >= 1, ErrorKind::parameter, "speckle radius must be >= 1");
  require(sigma_xi > 0.0 && sigma_xi < 1.0, ErrorKind::parameter, "sigma_xi must lie in (0,1)");
  require(target_percentile > 0.0 && target_percentile <= 100.0, ErrorKind::parameter,
          "target_percentile must lie in (0,100]");
  require(target_min_neighbors >= 1 && target_min_neighbors <= 9, ErrorKind::parameter,
          "target_min_neighbors must lie in [1,9]");
}

double lee_weight(double mean, double variance, double cu2) {
  if (variance <= 0.0) return 0.0;
  const double var_x = std::max(0.0, (variance - mean * mean * cu2) / (1.0 + cu2));
  return std::clamp(var_x / variance, 0.0, 1.0);
}

double lee_estimate(double pixel, double mean, double variance, double cu2) {
  return mean + lee_weight(mean, variance, cu2) * (pixel - mean);
}

PixelClass gamma_map_class(double mean, double variance, double looks) {
  const double ci = std::sqrt(variance) / mean;
  const double cu = 1.0 / std::sqrt(looks);
  if (ci <= cu) return PixelClass::Homogeneous;
  if (ci >= std::sqrt(2.0) * cu) return PixelClass::PointTarget;
  return PixelClass::Heterogeneous;
}

double gamma_map_estimate(double pixel, double mean, double variance, double looks) {
  switch (gamma_map_class(mean, variance, looks)) {
    case PixelClass::Homogeneous: return mean;
    case PixelClass::PointTarget: return pixel;
    case PixelClass::Heterogeneous: break;
  }
  const double cu2 = 1.0 / looks;
  const double ci2 = variance / (mean * mean);
  const double alpha = (1.0 + cu2) / (ci2 - cu2);
  const double b = alpha - looks - 1.0;
  const double d = mean * mean * b * b + 4.0 * alpha * looks * mean * pixel;
  const double est = (b * mean + std::sqrt(d)) / (2.0 * alpha);
  return std::clamp(est, std::min(mean, pixel), std::max(mean, pixel));
}

double two_sided_normal_quantile(double coverage) {
  require(coverage > 0.0 && coverage < 1.0, ErrorKind::parameter, "coverage must lie in (0,1)");
  // P(|Z| <= k) = erf(k / sqrt 2) is monotone in k; bisect.
  double lo = 0.0;
  double hi = 40.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::erf(mid / std::sqrt(2.0)) < coverage ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

void require_linear(const RasterGrid& grid, std::string_view op) {
  require(grid.units() == Units::linear, ErrorKind::unit, std::string(op) + " requires linear-power input");
}

RasterGrid lee_from_stats(const RasterGrid& grid, const FocalStats& stats, double cu2) {
  RasterGrid out(grid.spec(), Units::linear, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!stats.mean.valid_at(i)) {
      out.invalidate_at(i);
      continue;
    }
    out.values()[i] = lee_estimate(grid.values()[i], stats.mean.values()[i], stats.variance.values()[i], cu2);
  }
  return out;
}

/// Nearest-rank percentile of the valid values.
double percentile(const RasterGrid& grid, double q) {
  std::vector<double> vals;
  vals.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.valid_at(i)) vals.push_back(grid.values()[i]);
  }
  require(!vals.empty(), ErrorKind::parameter, "no valid pixels for percentile");
  auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(vals.size())));
  rank = std::clamp<std::size_t>(rank, 1, vals.size()) - 1;
  std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(rank), vals.end());
  return vals[rank];
}

// Directional half-windows of the 7x7 window, indexed 2*gradient + side.
bool in_half_window(int direction, int dx, int dy) {
  switch (direction) {
    case 0: return dx <= 0;       // left
    case 1: return dx >= 0;       // right
    case 2: return dy <= 0;       // top
    case 3: return dy >= 0;       // bottom
    case 4: return dx - dy >= 0;  // top-right
    case 5: return dx - dy <= 0;  // bottom-left
    case 6: return dx + dy <= 0;  // top-left
    case 7: return dx + dy >= 0;  // bottom-right
    default: return false;
  }
}

}  // namespace

RasterGrid boxcar(const RasterGrid& grid, const SpeckleParams& params) {
  params.validate();
  require_linear(grid, "boxcar");
  return focal_stats(grid, params.radius).mean;
}

RasterGrid lee(const RasterGrid& grid, const SpeckleParams& params) {
  params.validate();
  require_linear(grid, "lee");
  return lee_from_stats(grid, focal_stats(grid, params.radius), params.cu2());
}

RasterGrid refined_lee(const RasterGrid& grid, const SpeckleParams& params) {
  params.validate();
  require_linear(grid, "refined_lee");
  require(6 <= std::min(grid.width(), grid.height()), ErrorKind::parameter,
          "refined_lee needs a grid of at least 6x6 pixels");
  const double cu2 = params.cu2();
  const RasterGrid prior = lee_from_stats(grid, focal_stats(grid, 1), cu2);
  RasterGrid out(grid.spec(), Units::linear, 0.0);
  const int w = grid.width();
  const int h = grid.height();

  parallel_rows(h, [&](int y) {
    std::vector<double> window;
    window.reserve(49);
    for (int x = 0; x < w; ++x) {
      if (!prior.valid(x, y)) {
        out.invalidate(x, y);
        continue;
      }
      // 3x3 grid of 3x3 sub-window means, sub[row][col], centred at offsets -2, 0, +2.
      std::array<std::array<double, 3>, 3> sub{};
      bool complete = true;
      for (int a = 0; a < 3 && complete; ++a) {
        for (int b = 0; b < 3 && complete; ++b) {
          const int cx = x + 2 * (b - 1);
          const int cy = y + 2 * (a - 1);
          window.clear();
          for (int yy = cy - 1; yy <= cy + 1; ++yy) {
            for (int xx = cx - 1; xx <= cx + 1; ++xx) {
              if (grid.in_bounds(xx, yy) && grid.valid(xx, yy)) window.push_back(grid.at(xx, yy));
            }
          }
          if (window.empty()) {
            complete = false;
          } else {
            sub[a][b] = moments(window).mean;
          }
        }
      }
      if (!complete) {
        out.at(x, y) = prior.at(x, y);
        continue;
      }

      // Ratio edge detector: differences of log sub-means, unless a sub-mean is zero.
      std::array<std::array<double, 3>, 3> e = sub;
      bool positive = true;
      for (const auto& row : sub) {
        for (double v : row) positive = positive && v > 0.0;
      }
      if (positive) {
        for (auto& row : e) {
          for (double& v : row) v = std::log(v);
        }
      }
      const std::array<double, 4> gradient = {
          (e[0][2] + e[1][2] + e[2][2]) - (e[0][0] + e[1][0] + e[2][0]),
          (e[2][0] + e[2][1] + e[2][2]) - (e[0][0] + e[0][1] + e[0][2]),
          (e[0][1] + e[0][2] + e[1][2]) - (e[1][0] + e[2][0] + e[2][1]),
          (e[0][0] + e[0][1] + e[1][0]) - (e[1][2] + e[2][1] + e[2][2]),
      };
      int best = 0;
      for (int k = 1; k < 4; ++k) {
        if (std::abs(gradient[static_cast<std::size_t>(k)]) > std::abs(gradient[static_cast<std::size_t>(best)])) {
          best = k;
        }
      }
      // Side sub-means for each gradient: (first, second).
      const std::array<std::array<double, 2>, 4> sides = {{
          {sub[1][0], sub[1][2]},
          {sub[0][1], sub[2][1]},
          {sub[0][2], sub[2][0]},
          {sub[0][0], sub[2][2]},
      }};
      const double first = sides[static_cast<std::size_t>(best)][0];
      const double second = sides[static_cast<std::size_t>(best)][1];
      const double p = grid.at(x, y);
      // The pixels along the edge line through the centre share its side; the centre itself is
      // left out so the choice does not correlate with the value being filtered.
      constexpr std::array<std::array<int, 2>, 4> along = {{{0, 1}, {1, 0}, {1, 1}, {1, -1}}};
      const auto [ax, ay] = along[static_cast<std::size_t>(best)];
      double line = 0.0;
      int line_n = 0;
      for (int t : {-2, -1, 1, 2}) {
        if (grid.in_bounds(x + t * ax, y + t * ay) && grid.valid(x + t * ax, y + t * ay)) {
          line += grid.at(x + t * ax, y + t * ay);
          ++line_n;
        }
      }
      line = line_n > 0 ? line / line_n : p;
      int side = 0;
      if (first != second) {
        // Closer in ratio: below the geometric mean of the two sides picks the darker one.
        const bool pick_low = line * line <= first * second;
        const bool first_is_low = first < second;
        side = (pick_low == first_is_low) ? 0 : 1;
      }
      const int direction = 2 * best + side;

      window.clear();
      for (int dy = -3; dy <= 3; ++dy) {
        for (int dx = -3; dx <= 3; ++dx) {
          if (!in_half_window(direction, dx, dy)) continue;
          const int xx = x + dx;
          const int yy = y + dy;
          if (grid.in_bounds(xx, yy) && grid.valid(xx, yy)) window.push_back(grid.at(xx, yy));
        }
      }
      if (window.size() < 3) {
        out.at(x, y) = prior.at(x, y);
        continue;
      }
      const Moments m = moments(window);
      out.at(x, y) = lee_estimate(p, m.mean, m.variance, cu2);
    }
  });
  return out;
}

RasterGrid gamma_map(const RasterGrid& grid, const SpeckleParams& params) {
  params.validate();
  require_linear(grid, "gamma_map");
  const FocalStats stats = focal_stats(grid, params.radius);
  RasterGrid out(grid.spec(), Units::linear, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double m = stats.mean.values()[i];
    if (!stats.mean.valid_at(i) || m <= 0.0) {
      out.invalidate_at(i);
      continue;
    }
    out.values()[i] = gamma_map_estimate(grid.values()[i], m, stats.variance.values()[i], params.looks);
  }
  return out;
}

RasterGrid lee_sigma(const RasterGrid& grid, const SpeckleParams& params) {
  params.validate();
  require_linear(grid, "lee_sigma");
  require(2 * params.radius <= std::min(grid.width(), grid.height()), ErrorKind::parameter,
          "lee_sigma radius exceeds half the grid size");
  const double cu2 = params.cu2();
  const double half_width = params.sigma_xi * std::sqrt(cu2) * two_sided_normal_quantile(params.sigma_xi);
  const double target_level = percentile(grid, params.target_percentile);
  const RasterGrid prior = lee_from_stats(grid, focal_stats(grid, 1), cu2);
  RasterGrid out(grid.spec(), Units::linear, 0.0);
  const int w = grid.width();
  const int h = grid.height();
  const int r = params.radius;

  parallel_rows(h, [&](int y) {
    std::vector<double> window;
    window.reserve(static_cast<std::size_t>((2 * r + 1) * (2 * r + 1)));
    for (int x = 0; x < w; ++x) {
      if (!prior.valid(x, y)) {
        out.invalidate(x, y);
        continue;
      }
      const double p = grid.at(x, y);
      if (p > target_level) {
        int bright = 0;
        for (int yy = y - 1; yy <= y + 1; ++yy) {
          for (int xx = x - 1; xx <= x + 1; ++xx) {
            if (grid.in_bounds(xx, yy) && grid.valid(xx, yy) && grid.at(xx, yy) > target_level) ++bright;
          }
        }
        if (bright >= params.target_min_neighbors) {
          out.at(x, y) = p;
          continue;
        }
      }
      const double x_hat = prior.at(x, y);
      const double lo = x_hat * (1.0 - half_width);
      const double hi = x_hat * (1.0 + half_width);
      window.clear();
      for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy) {
        for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx) {
          if (!grid.valid(xx, yy)) continue;
          const double v = grid.at(xx, yy);
          if (v >= lo && v <= hi) window.push_back(v);
        }
      }
      if (window.size() < 3) {
        out.at(x, y) = x_hat;
        continue;
      }
      const Moments m = moments(window);
      out.at(x, y) = lee_estimate(p, m.mean, m.variance, cu2);
    }
  });
  return out;
}

RasterGrid apply(Filter filter, const RasterGrid& grid, const SpeckleParams& params) {
  switch (filter) {
    case Filter::boxcar: return boxcar(grid, params);
    case Filter::lee: return lee(grid, params);
    case Filter::refined_lee: return refined_lee(grid, params);
    case Filter::gamma_map: return gamma_map(grid, params);
    case Filter::lee_sigma: return lee_sigma(grid, params);
    case Filter::multitemporal: break;
  }
  fail(ErrorKind::parameter, "multitemporal filtering needs a time stack");
}

TimeStack multitemporal(const TimeStack& stack, Filter base, const SpeckleParams& params) {
  require(!stack.empty(), ErrorKind::parameter, "multitemporal filter needs at least one layer");
  require(stack.units() == Units::linear, ErrorKind::unit, "multitemporal filter requires linear-power input");
  require(base != Filter::multitemporal, ErrorKind::parameter, "multitemporal base filter cannot be multitemporal");
  params.validate();
  if (stack.size() == 1) return stack;

  std::vector<RasterGrid> filtered;
  filtered.reserve(stack.size());
  for (const auto& layer : stack.layers()) filtered.push_back(apply(base, layer.grid, params));

  const std::size_t n_px = stack.spec().size();
  const double n_layers = static_cast<double>(stack.size());
  std::vector<double> ratio_sum(n_px, 0.0);
  std::vector<std::uint8_t> ok(n_px, 1);
  for (std::size_t j = 0; j < stack.size(); ++j) {
    const auto& raw = stack[j].grid;
    const auto& est = filtered[j];
    for (std::size_t i = 0; i < n_px; ++i) {
      if (!ok[i]) continue;
      const double s = est.values()[i];
      if (!est.valid_at(i) || !raw.valid_at(i) || s <= 0.0) {
        ok[i] = 0;
        continue;
      }
      ratio_sum[i] += raw.values()[i] / s;
    }
  }

  std::vector<StackLayer> layers;
  layers.reserve(stack.size());
  for (std::size_t k = 0; k < stack.size(); ++k) {
    StackLayer layer = stack[k];
    RasterGrid& g = layer.grid;
    for (std::size_t i = 0; i < n_px; ++i) {
      if (!ok[i]) {
        g.invalidate_at(i);
        g.values()[i] = 0.0;
        continue;
      }
      g.values()[i] = filtered[k].values()[i] / n_layers * ratio_sum[i];
    }
    layers.push_back(std::move(layer));
  }
  return TimeStack(std::move(layers));
}

}  // namespace star::speckle
