#include "star/temporal.hpp"

#include <algorithm>
#include <string>

#include "star/error.hpp"
#include "star/focal.hpp"
#include "star/parallel.hpp"

namespace star::temporal {

std::string_view to_string(Stat s) {
  switch (s) {
    case Stat::mean: return "mean";
    case Stat::median: return "median";
    case Stat::min: return "min";
    case Stat::max: return "max";
  }
  return "median";
}

Stat parse_stat(std::string_view s) {
  for (auto v : {Stat::mean, Stat::median, Stat::min, Stat::max}) {
    if (to_string(v) == s) return v;
  }
  fail(ErrorKind::parameter, "unknown composite statistic '" + std::string(s) + "'");
}

std::string_view to_string(Combo c) {
  switch (c) {
    case Combo::sum: return "sum";
    case Combo::diff: return "diff";
    case Combo::ratio: return "ratio";
    case Combo::rvi: return "rvi";
  }
  return "sum";
}

Combo parse_combo(std::string_view s) {
  for (auto v : {Combo::sum, Combo::diff, Combo::ratio, Combo::rvi}) {
    if (to_string(v) == s) return v;
  }
  fail(ErrorKind::parameter, "unknown band combination '" + std::string(s) + "'");
}

TimeStack align_stack(std::vector<StackLayer> layers, const GridSpec& target) {
  validate(target);
  for (auto& layer : layers) {
    if (layer.grid.spec().crs_id != target.crs_id) {
      fail(ErrorKind::unsupported_projection, "layer CRS " + layer.grid.spec().crs_id + " differs from target " +
                                                  target.crs_id + ": pre-project inputs to one CRS");
    }
    if (!co_registered(layer.grid.spec(), target)) {
      layer.grid = resample_to(layer.grid, target, ResampleMethod::bilinear);
    }
  }
  std::stable_sort(layers.begin(), layers.end(),
                   [](const StackLayer& a, const StackLayer& b) { return a.timestamp < b.timestamp; });
  return TimeStack(std::move(layers));
}

RasterGrid composite(const TimeStack& stack, Stat stat) {
  require(!stack.empty(), ErrorKind::parameter, "composite needs at least one layer");
  const GridSpec& spec = stack.spec();
  RasterGrid out(spec, stack.units(), 0.0);
  const int w = spec.width;
  parallel_rows(spec.height, [&](int y) {
    std::vector<double> vals;
    vals.reserve(stack.size());
    for (int x = 0; x < w; ++x) {
      const std::size_t i = out.index(x, y);
      vals.clear();
      for (const auto& layer : stack.layers()) {
        if (layer.grid.valid_at(i)) vals.push_back(layer.grid.values()[i]);
      }
      if (vals.empty()) {
        out.invalidate_at(i);
        continue;
      }
      double v = 0.0;
      switch (stat) {
        case Stat::mean: {
          // Summing in sorted order makes the mean independent of layer order, bit for bit.
          std::sort(vals.begin(), vals.end());
          double s = 0.0;
          for (double a : vals) s += a;
          v = s / static_cast<double>(vals.size());
          break;
        }
        case Stat::median: {
          const auto mid = vals.begin() + static_cast<std::ptrdiff_t>((vals.size() - 1) / 2);
          std::nth_element(vals.begin(), mid, vals.end());
          v = *mid;
          break;
        }
        case Stat::min: v = *std::min_element(vals.begin(), vals.end()); break;
        case Stat::max: v = *std::max_element(vals.begin(), vals.end()); break;
      }
      out.values()[i] = v;
    }
  });
  return out;
}

RasterGrid composite_per_pass(const TimeStack& stack, Stat stat) {
  require(!stack.empty(), ErrorKind::parameter, "composite needs at least one layer");
  std::vector<StackLayer> asc;
  std::vector<StackLayer> desc;
  for (const auto& layer : stack.layers()) (layer.orbit_pass == OrbitPass::ASC ? asc : desc).push_back(layer);
  if (asc.empty() || desc.empty()) return composite(stack, stat);

  const RasterGrid a = composite(TimeStack(std::move(asc)), stat);
  const RasterGrid d = composite(TimeStack(std::move(desc)), stat);
  RasterGrid out(stack.spec(), stack.units(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool va = a.valid_at(i);
    const bool vd = d.valid_at(i);
    if (va && vd) {
      out.values()[i] = 0.5 * (a.values()[i] + d.values()[i]);
    } else if (va) {
      out.values()[i] = a.values()[i];
    } else if (vd) {
      out.values()[i] = d.values()[i];
    } else {
      out.invalidate_at(i);
    }
  }
  return out;
}

RasterGrid band_combine(const RasterGrid& vv, const RasterGrid& vh, Combo combo) {
  require(vv.units() == Units::linear && vh.units() == Units::linear, ErrorKind::unit,
          "band_combine requires linear VV and VH");
  require_co_registered(vv.spec(), vh.spec(), "band_combine");
  RasterGrid out(vv.spec(), combo == Combo::sum ? Units::linear : Units::dimensionless, 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!vv.valid_at(i) || !vh.valid_at(i)) {
      out.invalidate_at(i);
      continue;
    }
    const double a = vv.values()[i];
    const double b = vh.values()[i];
    switch (combo) {
      case Combo::sum: out.values()[i] = a + b; break;
      case Combo::diff: out.values()[i] = a - b; break;
      case Combo::ratio:
        if (a <= 0.0) {
          out.invalidate_at(i);
        } else {
          out.values()[i] = b / a;
        }
        break;
      case Combo::rvi:
        if (a + b <= 0.0) {
          out.invalidate_at(i);
        } else {
          out.values()[i] = 4.0 * b / (a + b);
        }
        break;
    }
  }
  return out;
}

}  // namespace star::temporal
