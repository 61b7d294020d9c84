#include "star/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "star/error.hpp"

namespace star {

namespace {

constexpr std::pair<Step, std::string_view> kStepNames[] = {
    {Step::mask_border_angle, "mask_border_angle"},
    {Step::mask_extremes, "mask_extremes"},
    {Step::to_linear, "to_linear"},
    {Step::speckle, "speckle"},
    {Step::flatten, "flatten"},
    {Step::slope_mask, "slope_mask"},
    {Step::to_db, "to_db"},
    {Step::smooth, "smooth"},
};

[[noreturn]] void config_error(const std::string& what) { fail(ErrorKind::config, "config: " + what); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  config_error(key + ": expected a number, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int i = std::stoi(v, &used);
    if (used == v.size()) return i;
  } catch (const std::exception&) {
  }
  config_error(key + ": expected an integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  config_error(key + ": expected true or false, got '" + v + "'");
}

// Enum parsers throw parameter errors; re-raise them as config errors naming the key.
template <typename F>
auto parse_enum(const std::string& key, const std::string& v, F parse) {
  try {
    return parse(v);
  } catch (const Error& e) {
    config_error(key + ": " + e.what());
  }
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

}  // namespace

std::string_view to_string(Step s) {
  for (const auto& [step, name] : kStepNames) {
    if (step == s) return name;
  }
  return "?";
}

Step parse_step(std::string_view s) {
  for (const auto& [step, name] : kStepNames) {
    if (name == s) return step;
  }
  config_error("unknown pipeline step '" + std::string(s) + "'");
}

const std::vector<Step>& default_steps() {
  static const std::vector<Step> steps{Step::mask_border_angle, Step::mask_extremes, Step::to_linear, Step::speckle,
                                       Step::flatten,           Step::slope_mask,    Step::to_db,     Step::smooth};
  return steps;
}

const std::vector<Step>& all_steps() { return default_steps(); }

void PipelineConfig::validate() const {
  const auto wrap = [](const std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::config) throw;
      config_error(e.what());
    }
  };
  wrap([&] { angle.validate(); });
  wrap([&] { db.validate(); });
  wrap([&] { speckle.validate(); });
  wrap([&] { chessboard().validate(); });
  if (base_filter == speckle::Filter::multitemporal) config_error("speckle.base_filter cannot be multitemporal");
  if (!(max_slope_deg > 0.0 && max_slope_deg <= 90.0)) config_error("terrain.max_slope_deg must lie in (0, 90]");
  if (min_pixels < 1) config_error("objects.min_pixels must be >= 1");
  if (smooth_radius < 1) config_error("smooth.radius must be >= 1");
  if (smooth_shape != "square" && smooth_shape != "circle") config_error("smooth.shape must be square or circle");
  if (window_days < 0) config_error("composite.window_days must be >= 0");
  if (per_degree && !(per_degree->x > 0.0 && per_degree->y > 0.0)) {
    config_error("area.m_per_deg_x and area.m_per_deg_y must be positive");
  }

  // Unit discipline: scenes enter in dB.
  Units state = Units::dB;
  std::set<Step> seen;
  for (const Step s : steps) {
    const std::string name(to_string(s));
    if (!seen.insert(s).second) config_error("pipeline.steps: '" + name + "' appears twice");
    const auto need = [&](Units u) {
      if (state != u) {
        config_error("pipeline.steps: '" + name + "' requires " + std::string(to_string(u)) +
                     " input but the preceding steps leave " + std::string(to_string(state)));
      }
    };
    switch (s) {
      case Step::mask_border_angle:
      case Step::slope_mask:
      case Step::smooth:
        break;
      case Step::mask_extremes:
        need(Units::dB);
        break;
      case Step::to_linear:
        need(Units::dB);
        state = Units::linear;
        break;
      case Step::speckle:
      case Step::flatten:
        need(Units::linear);
        break;
      case Step::to_db:
        need(Units::linear);
        state = Units::dB;
        break;
    }
  }
  if (state != Units::dB) config_error("pipeline.steps must end in dB (add to_db)");
}

flood::ChessboardParams PipelineConfig::chessboard() const {
  flood::ChessboardParams p;
  p.cell_px = cell_px;
  p.bimodality_min = bimodality_min;
  p.bins = bins;
  p.lo_db = db.min_db;
  p.hi_db = db.max_db;
  return p;
}

Kernel PipelineConfig::smoothing_kernel() const {
  return smooth_shape == "circle" ? Kernel::circle(smooth_radius) : Kernel::square(smooth_radius);
}

PipelineConfig parse_config(std::string_view text) {
  PipelineConfig c;
  std::optional<double> mpd_x;
  std::optional<double> mpd_y;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter, std::less<>> setters{
      {"pipeline.steps",
       [&](const auto&, const auto& v) {
         c.steps.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) {
           item = trim(item);
           if (!item.empty()) c.steps.push_back(parse_step(item));
         }
       }},
      {"window.pre", [&](const auto&, const auto& v) { c.window_pre = v; }},
      {"window.during", [&](const auto&, const auto& v) { c.window_during = v; }},
      {"angle_min_deg", [&](const auto& k, const auto& v) { c.angle.min_deg = to_double(k, v); }},
      {"angle_max_deg", [&](const auto& k, const auto& v) { c.angle.max_deg = to_double(k, v); }},
      {"db_min", [&](const auto& k, const auto& v) { c.db.min_db = to_double(k, v); }},
      {"db_max", [&](const auto& k, const auto& v) { c.db.max_db = to_double(k, v); }},
      {"speckle.filter", [&](const auto& k, const auto& v) { c.filter = parse_enum(k, v, speckle::parse_filter); }},
      {"speckle.base_filter",
       [&](const auto& k, const auto& v) { c.base_filter = parse_enum(k, v, speckle::parse_filter); }},
      {"speckle.radius", [&](const auto& k, const auto& v) { c.speckle.radius = to_int(k, v); }},
      {"speckle.looks", [&](const auto& k, const auto& v) { c.speckle.looks = to_double(k, v); }},
      {"speckle.xi", [&](const auto& k, const auto& v) { c.speckle.sigma_xi = to_double(k, v); }},
      {"speckle.target_percentile",
       [&](const auto& k, const auto& v) { c.speckle.target_percentile = to_double(k, v); }},
      {"speckle.target_min_neighbors",
       [&](const auto& k, const auto& v) { c.speckle.target_min_neighbors = to_int(k, v); }},
      {"terrain.model", [&](const auto& k, const auto& v) { c.terrain_model = parse_enum(k, v, terrain::parse_model); }},
      {"terrain.max_slope_deg", [&](const auto& k, const auto& v) { c.max_slope_deg = to_double(k, v); }},
      {"terrain.dem_path", [&](const auto&, const auto& v) { c.dem_path = v; }},
      {"terrain.heading_asc_deg", [&](const auto& k, const auto& v) { c.heading_asc_deg = to_double(k, v); }},
      {"terrain.heading_desc_deg", [&](const auto& k, const auto& v) { c.heading_desc_deg = to_double(k, v); }},
      {"objects.connectivity",
       [&](const auto& k, const auto& v) { c.connectivity = parse_enum(k, v, objects::parse_connectivity); }},
      {"objects.min_pixels", [&](const auto& k, const auto& v) { c.min_pixels = to_int(k, v); }},
      {"smooth.radius", [&](const auto& k, const auto& v) { c.smooth_radius = to_int(k, v); }},
      {"smooth.shape", [&](const auto&, const auto& v) { c.smooth_shape = v; }},
      {"smooth.mode", [&](const auto& k, const auto& v) { c.smooth_mode = parse_enum(k, v, objects::parse_smooth_mode); }},
      {"composite.stat", [&](const auto& k, const auto& v) { c.composite_stat = parse_enum(k, v, temporal::parse_stat); }},
      {"composite.window_days", [&](const auto& k, const auto& v) { c.window_days = to_int(k, v); }},
      {"composite.per_pass", [&](const auto& k, const auto& v) { c.per_pass = to_bool(k, v); }},
      {"flood.cell_px", [&](const auto& k, const auto& v) { c.cell_px = to_int(k, v); }},
      {"flood.bimodality_min", [&](const auto& k, const auto& v) { c.bimodality_min = to_double(k, v); }},
      {"flood.bins", [&](const auto& k, const auto& v) { c.bins = to_int(k, v); }},
      {"flood.fallback_db", [&](const auto& k, const auto& v) { c.fallback_db = to_double(k, v); }},
      {"flood.otsu_input",
       [&](const auto& k, const auto& v) {
         if (v == "smoothed") {
           c.otsu_input = OtsuInput::smoothed;
         } else if (v == "unsmoothed") {
           c.otsu_input = OtsuInput::unsmoothed;
         } else {
           config_error(k + ": expected smoothed or unsmoothed, got '" + v + "'");
         }
       }},
      {"flood.polarization",
       [&](const auto& k, const auto& v) { c.polarization = parse_enum(k, v, parse_polarization); }},
      {"area.m_per_deg_x", [&](const auto& k, const auto& v) { mpd_x = to_double(k, v); }},
      {"area.m_per_deg_y", [&](const auto& k, const auto& v) { mpd_y = to_double(k, v); }},
  };

  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error(fmt::format("line {}: expected 'key = value'", line_no));
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) config_error(fmt::format("line {}: unknown key '{}'", line_no, key));
    if (!seen.insert(key).second) config_error(fmt::format("line {}: duplicate key '{}'", line_no, key));
    it->second(key, value);
  }
  if (mpd_x.has_value() != mpd_y.has_value()) config_error("area.m_per_deg_x and area.m_per_deg_y go together");
  if (mpd_x) c.per_degree = MetersPerDegree{*mpd_x, *mpd_y};
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::config, "config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const PipelineConfig& c) {
  std::string steps;
  for (const Step s : c.steps) steps += (steps.empty() ? "" : ",") + std::string(to_string(s));
  std::string out;
  const auto kv = [&](std::string_view k, const std::string& v) { out += fmt::format("{} = {}\n", k, v); };
  kv("pipeline.steps", steps);
  kv("window.pre", c.window_pre);
  kv("window.during", c.window_during);
  kv("angle_min_deg", fmt_double(c.angle.min_deg));
  kv("angle_max_deg", fmt_double(c.angle.max_deg));
  kv("db_min", fmt_double(c.db.min_db));
  kv("db_max", fmt_double(c.db.max_db));
  kv("speckle.filter", std::string(speckle::to_string(c.filter)));
  kv("speckle.base_filter", std::string(speckle::to_string(c.base_filter)));
  kv("speckle.radius", std::to_string(c.speckle.radius));
  kv("speckle.looks", fmt_double(c.speckle.looks));
  kv("speckle.xi", fmt_double(c.speckle.sigma_xi));
  kv("speckle.target_percentile", fmt_double(c.speckle.target_percentile));
  kv("speckle.target_min_neighbors", std::to_string(c.speckle.target_min_neighbors));
  kv("terrain.model", std::string(terrain::to_string(c.terrain_model)));
  kv("terrain.max_slope_deg", fmt_double(c.max_slope_deg));
  kv("terrain.dem_path", c.dem_path);
  kv("terrain.heading_asc_deg", fmt_double(c.heading_asc_deg));
  kv("terrain.heading_desc_deg", fmt_double(c.heading_desc_deg));
  kv("objects.connectivity", std::string(objects::to_string(c.connectivity)));
  kv("objects.min_pixels", std::to_string(c.min_pixels));
  kv("smooth.radius", std::to_string(c.smooth_radius));
  kv("smooth.shape", c.smooth_shape);
  kv("smooth.mode", std::string(objects::to_string(c.smooth_mode)));
  kv("composite.stat", std::string(temporal::to_string(c.composite_stat)));
  kv("composite.window_days", std::to_string(c.window_days));
  kv("composite.per_pass", c.per_pass ? "true" : "false");
  kv("flood.cell_px", std::to_string(c.cell_px));
  kv("flood.bimodality_min", fmt_double(c.bimodality_min));
  kv("flood.bins", std::to_string(c.bins));
  kv("flood.fallback_db", fmt_double(c.fallback_db));
  kv("flood.otsu_input", c.otsu_input == OtsuInput::smoothed ? "smoothed" : "unsmoothed");
  kv("flood.polarization", std::string(to_string(c.polarization)));
  if (c.per_degree) {
    kv("area.m_per_deg_x", fmt_double(c.per_degree->x));
    kv("area.m_per_deg_y", fmt_double(c.per_degree->y));
  }
  return out;
}

}  // namespace star
