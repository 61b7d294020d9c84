#include "star/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "star/calibration.hpp"
#include "star/error.hpp"
#include "star/hash.hpp"
#include "star/io.hpp"
#include "star/objects.hpp"
#include "star/speckle.hpp"
#include "star/temporal.hpp"
#include "star/terrain.hpp"
#include "star/time.hpp"

namespace star {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct SceneState {
  cube::SceneManifest meta;
  RasterGrid grid;
  fs::path source;  // file the current grid was last persisted to
  std::optional<RasterGrid> angle;
  fs::path angle_file;
  std::optional<RasterGrid> before_smooth;
  fs::path before_smooth_file;
};

class Run {
 public:
  Run(const PipelineConfig& config, cube::Cube& cube, std::string run_id)
      : cfg_(config), cube_(cube), run_id_(std::move(run_id)), dir_(cube.run_dir(run_id_)) {}

  RunResult execute();

 private:
  std::string rel(const fs::path& p) const { return fs::relative(p, cube_.root()).generic_string(); }

  ordered_json file_entry(const fs::path& p) const { return {{"path", rel(p)}, {"sha256", sha256_file(p)}}; }

  // Persists a raster (or mask) with its provenance sidecar.
  template <typename Writer>
  void persist(const fs::path& out, Writer write, const std::string& step, const ordered_json& params,
               const std::vector<fs::path>& inputs, const std::string& scene_id) {
    fs::create_directories(out.parent_path());
    write(out);
    ordered_json sidecar{{"step", step}, {"scene_id", scene_id}, {"params", params}};
    sidecar["inputs"] = ordered_json::array();
    for (const auto& in : inputs) sidecar["inputs"].push_back(file_entry(in));
    sidecar["output"] = file_entry(out);
    write_text(fs::path(out).replace_extension(".prov.json"), sidecar.dump(2) + "\n");
    steps_log_.push_back({{"step", step}, {"scene_id", scene_id}, {"status", "done"}, {"output", sidecar["output"]}});
  }

  void persist_grid(const fs::path& out, const RasterGrid& g, const std::string& step, const ordered_json& params,
                    const std::vector<fs::path>& inputs, const std::string& scene_id) {
    persist(out, [&](const fs::path& p) { io::write_geotiff(p, g); }, step, params, inputs, scene_id);
  }

  void skip(const std::string& step, const std::string& scene_id, const std::string& reason) {
    spdlog::info("skipping {} for {}: {}", step, scene_id.empty() ? "all scenes" : scene_id, reason);
    skipped_.push_back({{"step", step}, {"scene_id", scene_id}, {"reason", reason}});
  }

  static void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::trunc | std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::io, "cannot write " + p.string());
    out << text;
  }

  ordered_json step_params(Step s) const;
  void load_scenes();
  void load_dem();
  void apply_step(Step s);
  RasterGrid dem_on(const GridSpec& spec);
  double threshold(const RasterGrid& input, ordered_json& info, std::string& source);

  const PipelineConfig& cfg_;
  cube::Cube& cube_;
  std::string run_id_;
  fs::path dir_;

  std::vector<SceneState> scenes_;
  DateWindow pre_;
  DateWindow during_;
  std::optional<RasterGrid> dem_;
  fs::path dem_file_;
  std::map<std::string, RasterGrid> dem_cache_;

  ordered_json steps_log_ = ordered_json::array();
  ordered_json skipped_ = ordered_json::array();
};

ordered_json Run::step_params(Step s) const {
  switch (s) {
    case Step::mask_border_angle:
      return {{"angle_min_deg", cfg_.angle.min_deg}, {"angle_max_deg", cfg_.angle.max_deg}};
    case Step::mask_extremes:
      return {{"db_min", cfg_.db.min_db}, {"db_max", cfg_.db.max_db}};
    case Step::to_linear:
    case Step::to_db:
      return ordered_json::object();
    case Step::speckle: {
      ordered_json p{{"filter", speckle::to_string(cfg_.filter)},
                     {"radius", cfg_.speckle.radius},
                     {"looks", cfg_.speckle.looks},
                     {"xi", cfg_.speckle.sigma_xi},
                     {"target_percentile", cfg_.speckle.target_percentile},
                     {"target_min_neighbors", cfg_.speckle.target_min_neighbors}};
      if (cfg_.filter == speckle::Filter::multitemporal) p["base_filter"] = speckle::to_string(cfg_.base_filter);
      return p;
    }
    case Step::flatten:
      return {{"model", terrain::to_string(cfg_.terrain_model)},
              {"heading_asc_deg", cfg_.heading_asc_deg},
              {"heading_desc_deg", cfg_.heading_desc_deg}};
    case Step::slope_mask:
      return {{"max_slope_deg", cfg_.max_slope_deg}};
    case Step::smooth:
      return {{"radius", cfg_.smooth_radius},
              {"shape", cfg_.smooth_shape},
              {"mode", objects::to_string(cfg_.smooth_mode)}};
  }
  return {};
}

void Run::load_scenes() {
  require(!cfg_.window_pre.empty(), ErrorKind::config, "config: window.pre is required");
  require(!cfg_.window_during.empty(), ErrorKind::config, "config: window.during is required");
  try {
    pre_ = parse_window(cfg_.window_pre, cfg_.window_days);
    during_ = parse_window(cfg_.window_during, cfg_.window_days);
  } catch (const Error& e) {
    fail(ErrorKind::config, std::string("config: ") + e.what());
  }

  auto all = cube_.scenes();
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.acquired != b.acquired ? a.acquired < b.acquired : a.scene_id < b.scene_id;
  });
  const std::string pol(to_string(cfg_.polarization));
  int n_pre = 0;
  int n_during = 0;
  for (const auto& m : all) {
    const bool in_pre = pre_.contains(m.acquired);
    const bool in_during = during_.contains(m.acquired);
    if (!in_pre && !in_during) continue;
    n_pre += in_pre ? 1 : 0;
    n_during += in_during ? 1 : 0;
    SceneState s;
    s.meta = m;
    require(m.bands.contains(pol), ErrorKind::not_found, "scene '" + m.scene_id + "' has no " + pol + " band");
    s.source = cube_.scene_dir(m.scene_id) / m.bands.at(pol);
    s.grid = cube_.load_band(m, pol);
    if (m.bands.contains("angle")) {
      s.angle = cube_.load_band(m, "angle");
      s.angle->set_units(Units::degrees);
      s.angle_file = cube_.scene_dir(m.scene_id) / m.bands.at("angle");
    }
    scenes_.push_back(std::move(s));
  }
  require(n_pre > 0, ErrorKind::not_found, "no scene in the pre window " + cfg_.window_pre);
  require(n_during > 0, ErrorKind::not_found, "no scene in the during window " + cfg_.window_during);
}

void Run::load_dem() {
  fs::path p = cfg_.dem_path;
  if (p.is_relative()) p = cube_.root() / p;
  if (!fs::exists(p)) return;
  dem_ = io::read_raster(p);
  dem_->set_units(Units::meters);
  dem_file_ = p;
}

RasterGrid Run::dem_on(const GridSpec& spec) {
  if (co_registered(dem_->spec(), spec)) return *dem_;
  const std::string key = fmt::format("{}|{}x{}|{},{},{},{}", spec.crs_id, spec.width, spec.height,
                                      spec.transform.origin_x, spec.transform.origin_y, spec.transform.pixel_w,
                                      spec.transform.pixel_h);
  auto it = dem_cache_.find(key);
  if (it == dem_cache_.end()) {
    it = dem_cache_.emplace(key, resample_to(*dem_, spec, ResampleMethod::bilinear)).first;
  }
  return it->second;
}

void Run::apply_step(Step s) {
  const std::string name(to_string(s));
  const ordered_json params = step_params(s);
  const std::string pol(to_string(cfg_.polarization));

  if ((s == Step::flatten || s == Step::slope_mask) && !dem_) {
    skip(name, "", "no DEM at " + cfg_.dem_path);
    return;
  }

  if (s == Step::speckle && cfg_.filter == speckle::Filter::multitemporal) {
    std::vector<StackLayer> layers;
    for (const auto& sc : scenes_) {
      layers.push_back({sc.grid, sc.meta.acquired, sc.meta.orbit_pass, sc.meta.relative_orbit, cfg_.polarization});
    }
    TimeStack filtered;
    try {
      filtered = speckle::multitemporal(TimeStack(std::move(layers)), cfg_.base_filter, cfg_.speckle);
    } catch (const Error& e) {
      throw Error(e.kind(), "step " + name + " (all scenes): " + e.what());
    }
    std::vector<fs::path> inputs;
    for (const auto& sc : scenes_) inputs.push_back(sc.source);
    for (std::size_t i = 0; i < scenes_.size(); ++i) {
      auto& sc = scenes_[i];
      sc.grid = filtered[i].grid;
      const fs::path out = dir_ / name / (sc.meta.scene_id + "_" + pol + ".tif");
      persist_grid(out, sc.grid, name, params, inputs, sc.meta.scene_id);
      sc.source = out;
    }
    return;
  }

  for (auto& sc : scenes_) {
    const std::string& id = sc.meta.scene_id;
    std::vector<fs::path> inputs{sc.source};
    try {
      switch (s) {
        case Step::mask_border_angle:
          if (!sc.angle) {
            skip(name, id, "scene has no angle band");
            continue;
          }
          sc.grid = calib::mask_border_angle(sc.grid, *sc.angle, cfg_.angle);
          inputs.push_back(sc.angle_file);
          break;
        case Step::mask_extremes:
          sc.grid = calib::mask_extremes(sc.grid, cfg_.db);
          break;
        case Step::to_linear:
          sc.grid = calib::to_linear(sc.grid);
          break;
        case Step::speckle:
          sc.grid = speckle::apply(cfg_.filter, sc.grid, cfg_.speckle);
          break;
        case Step::flatten: {
          if (!sc.angle) {
            skip(name, id, "scene has no angle band");
            continue;
          }
          const double heading =
              sc.meta.orbit_pass == OrbitPass::ASC ? cfg_.heading_asc_deg : cfg_.heading_desc_deg;
          terrain::SarGeometry geom{*sc.angle, heading, sc.meta.orbit_pass};
          sc.grid = terrain::flatten(sc.grid, dem_on(sc.grid.spec()), geom, cfg_.terrain_model, cfg_.per_degree);
          inputs.push_back(sc.angle_file);
          inputs.push_back(dem_file_);
          break;
        }
        case Step::slope_mask:
          sc.grid = terrain::slope_mask(sc.grid, dem_on(sc.grid.spec()), cfg_.max_slope_deg, cfg_.per_degree);
          inputs.push_back(dem_file_);
          break;
        case Step::to_db:
          sc.grid = calib::to_db(sc.grid);
          break;
        case Step::smooth:
          sc.before_smooth = sc.grid;
          sc.before_smooth_file = sc.source;
          sc.grid = objects::smooth(sc.grid, cfg_.smoothing_kernel(), cfg_.smooth_mode);
          break;
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "step " + name + " scene " + id + ": " + e.what());
    }
    const fs::path out = dir_ / name / (id + "_" + pol + ".tif");
    persist_grid(out, sc.grid, name, params, inputs, id);
    sc.source = out;
  }
}

double Run::threshold(const RasterGrid& input, ordered_json& info, std::string& source) {
  const auto params = cfg_.chessboard();
  try {
    const auto cb = flood::chessboard_otsu(input, params);
    source = "chessboard";
    info = {{"cells_total", cb.cells_total},
            {"cells_selected", cb.cells_selected},
            {"bimodality", cb.otsu.bimodality}};
    spdlog::info("chessboard otsu: {:.4f} dB from {}/{} cells", cb.otsu.threshold, cb.cells_selected, cb.cells_total);
    return cb.otsu.threshold;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::no_bimodal_region) throw;
    spdlog::warn("chessboard otsu failed ({}); falling back to global otsu", e.what());
  }
  try {
    auto hist = flood::Histogram::uniform(params.lo_db, params.hi_db, params.bins);
    hist.add(input);
    const auto r = flood::otsu(hist);
    source = "global_otsu";
    info = {{"bimodality", r.bimodality}};
    spdlog::info("global otsu: {:.4f} dB", r.threshold);
    return r.threshold;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::degenerate_histogram) throw;
    spdlog::warn("global otsu failed ({}); using fixed threshold {} dB", e.what(), cfg_.fallback_db);
  }
  source = "fixed";
  info = ordered_json::object();
  return cfg_.fallback_db;
}

RunResult Run::execute() {
  load_scenes();
  load_dem();
  if (fs::exists(dir_)) fs::remove_all(dir_);
  fs::create_directories(dir_);

  for (const Step s : all_steps()) {
    if (std::find(cfg_.steps.begin(), cfg_.steps.end(), s) == cfg_.steps.end()) {
      skip(std::string(to_string(s)), "", "not in pipeline.steps");
    }
  }
  for (const Step s : cfg_.steps) apply_step(s);

  // Composites per window on the grid of the earliest during scene.
  const auto first_during = std::find_if(scenes_.begin(), scenes_.end(),
                                         [&](const auto& sc) { return during_.contains(sc.meta.acquired); });
  const GridSpec target = first_during->grid.spec();
  const auto build = [&](const DateWindow& w, bool unsmoothed, std::vector<fs::path>& inputs,
                         std::string& last_date) {
    std::vector<StackLayer> layers;
    for (const auto& sc : scenes_) {
      if (!w.contains(sc.meta.acquired)) continue;
      const bool use_before = unsmoothed && sc.before_smooth.has_value();
      layers.push_back({use_before ? *sc.before_smooth : sc.grid, sc.meta.acquired, sc.meta.orbit_pass,
                        sc.meta.relative_orbit, cfg_.polarization});
      inputs.push_back(use_before ? sc.before_smooth_file : sc.source);
      last_date = format_date(sc.meta.acquired);
    }
    const TimeStack stack = temporal::align_stack(std::move(layers), target);
    return cfg_.per_pass ? temporal::composite_per_pass(stack, cfg_.composite_stat)
                         : temporal::composite(stack, cfg_.composite_stat);
  };
  const ordered_json comp_params{{"stat", temporal::to_string(cfg_.composite_stat)},
                                 {"per_pass", cfg_.per_pass},
                                 {"window_days", cfg_.window_days}};
  std::vector<fs::path> pre_inputs;
  std::vector<fs::path> during_inputs;
  std::string date_pre;
  std::string date_during;
  const RasterGrid pre_comp = build(pre_, false, pre_inputs, date_pre);
  const RasterGrid during_comp = build(during_, false, during_inputs, date_during);
  require(pre_comp.units() == Units::dB, ErrorKind::unit, "composites must be in dB");
  persist_grid(dir_ / "composite" / "pre.tif", pre_comp, "composite", comp_params, pre_inputs, "pre");
  persist_grid(dir_ / "composite" / "during.tif", during_comp, "composite", comp_params, during_inputs, "during");

  RasterGrid otsu_input = during_comp;
  if (cfg_.otsu_input == OtsuInput::unsmoothed &&
      std::any_of(scenes_.begin(), scenes_.end(), [](const auto& sc) { return sc.before_smooth.has_value(); })) {
    std::vector<fs::path> inputs;
    std::string ignored;
    otsu_input = build(during_, true, inputs, ignored);
    persist_grid(dir_ / "composite" / "during_unsmoothed.tif", otsu_input, "composite", comp_params, inputs,
                 "during");
  }

  RunResult result;
  result.run_id = run_id_;
  result.run_dir = dir_;
  ordered_json thr_info;
  result.threshold_db = threshold(otsu_input, thr_info, result.threshold_source);

  std::optional<BinaryMask> steep;
  if (dem_) {
    const auto slope = terrain::slope_aspect(dem_on(target), cfg_.per_degree).slope;
    BinaryMask m(target);
    for (std::size_t i = 0; i < m.size(); ++i) {
      m.bits()[i] = slope.valid_at(i) && slope.values()[i] > cfg_.max_slope_deg ? 1 : 0;
      m.valid_mask()[i] = slope.valid_at(i) ? 1 : 0;
    }
    steep = std::move(m);
  }
  const BinaryMask* steep_ptr = steep ? &*steep : nullptr;
  const BinaryMask pre_water =
      flood::water_mask(pre_comp, result.threshold_db, steep_ptr, cfg_.min_pixels, cfg_.connectivity);
  const BinaryMask during_water =
      flood::water_mask(during_comp, result.threshold_db, steep_ptr, cfg_.min_pixels, cfg_.connectivity);
  const auto extent =
      flood::flood_extent(pre_water, during_water, pixel_area_m2(target, cfg_.per_degree), date_pre, date_during);
  result.report = extent.report;

  const ordered_json wm_params{{"threshold_db", result.threshold_db},
                               {"threshold_source", result.threshold_source},
                               {"min_pixels", cfg_.min_pixels},
                               {"connectivity", objects::to_string(cfg_.connectivity)}};
  std::vector<fs::path> wm_extra;
  if (dem_) wm_extra.push_back(dem_file_);
  const auto mask_writer = [](const BinaryMask& m) {
    return [&m](const fs::path& p) { io::write_mask_geotiff(p, m); };
  };
  auto pre_in = wm_extra;
  pre_in.insert(pre_in.begin(), dir_ / "composite" / "pre.tif");
  auto during_in = wm_extra;
  during_in.insert(during_in.begin(), dir_ / "composite" / "during.tif");
  persist(dir_ / "pre_water.tif", mask_writer(pre_water), "water_mask", wm_params, pre_in, "pre");
  persist(dir_ / "during_water.tif", mask_writer(during_water), "water_mask", wm_params, during_in, "during");
  persist(dir_ / "flood.tif", mask_writer(extent.flood), "flood_extent", ordered_json::object(),
          {dir_ / "pre_water.tif", dir_ / "during_water.tif"}, "flood");

  write_text(dir_ / "report.csv", flood::report_csv_header() + "\n" + flood::report_csv_row(result.report) + "\n");

  ordered_json config_obj = ordered_json::object();
  {
    std::istringstream in(to_text(cfg_));
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find(" = ");
      if (eq != std::string::npos) config_obj[line.substr(0, eq)] = line.substr(eq + 3);
    }
  }
  ordered_json scenes_obj{{"pre", ordered_json::array()}, {"during", ordered_json::array()}};
  for (const auto& sc : scenes_) {
    if (pre_.contains(sc.meta.acquired)) scenes_obj["pre"].push_back(sc.meta.scene_id);
    if (during_.contains(sc.meta.acquired)) scenes_obj["during"].push_back(sc.meta.scene_id);
  }
  ordered_json prov{{"run_id", run_id_},
                    {"config", config_obj},
                    {"scenes", scenes_obj},
                    {"steps", steps_log_},
                    {"skipped", skipped_},
                    {"threshold",
                     {{"value_db", result.threshold_db}, {"source", result.threshold_source}, {"details", thr_info}}},
                    {"outputs",
                     {file_entry(dir_ / "report.csv"), file_entry(dir_ / "pre_water.tif"),
                      file_entry(dir_ / "during_water.tif"), file_entry(dir_ / "flood.tif")}}};
  write_text(dir_ / "provenance.json", prov.dump(2) + "\n");
  return result;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string default_run_id(const PipelineConfig& config) {
  const std::string text = to_text(config);
  return "run-" + sha256_hex({reinterpret_cast<const unsigned char*>(text.data()), text.size()}).substr(0, 12);
}

RunResult run_pipeline(const PipelineConfig& config, cube::Cube& cube, const std::string& run_id) {
  config.validate();
  require(!run_id.empty() && run_id.find('/') == std::string::npos && run_id != "." && run_id != "..",
          ErrorKind::parameter, "invalid run id '" + run_id + "'");
  Run run(config, cube, run_id);
  return run.execute();
}

std::string report(const cube::Cube& cube, const std::string& run_id) {
  const fs::path dir = cube.run_dir(run_id);
  require(!run_id.empty() && fs::exists(dir / "report.csv") && fs::exists(dir / "provenance.json"),
          ErrorKind::not_found, "no completed run '" + run_id + "' in " + cube.root().string());
  std::string out = read_text(dir / "report.csv");
  const auto prov = ordered_json::parse(read_text(dir / "provenance.json"));

  out += fmt::format("\n{:<18} {:<20} {:<8} {}\n", "step", "scene", "status", "output / reason");
  for (const auto& s : prov.at("steps")) {
    out += fmt::format("{:<18} {:<20} {:<8} {}\n", s.at("step").get<std::string>(), s.at("scene_id").get<std::string>(),
                       "done", s.at("output").at("path").get<std::string>());
  }
  for (const auto& s : prov.at("skipped")) {
    const auto scene = s.at("scene_id").get<std::string>();
    out += fmt::format("{:<18} {:<20} {:<8} {}\n", s.at("step").get<std::string>(), scene.empty() ? "*" : scene,
                       "skipped", s.at("reason").get<std::string>());
  }
  const auto& thr = prov.at("threshold");
  out += fmt::format("\nthreshold: {} dB ({})\n", thr.at("value_db").get<double>(), thr.at("source").get<std::string>());
  return out;
}

}  // namespace star
