// star: command-line front end for the cube, the pipeline and the synthetic scene generator.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "star/config.hpp"
#include "star/cube.hpp"
#include "star/error.hpp"
#include "star/io.hpp"
#include "star/parallel.hpp"
#include "star/pipeline.hpp"
#include "star/synth.hpp"
#include "star/time.hpp"

namespace {

using star::ErrorKind;
using star::fail;

std::vector<double> split_numbers(const std::string& text, char sep, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::parameter, fmt::format("{}: '{}' is not a number", what, item));
    }
  }
  if (expected != 0 && out.size() != expected) {
    fail(ErrorKind::parameter, fmt::format("{}: expected {} comma-separated numbers, got '{}'", what, expected, text));
  }
  return out;
}

star::synth::Polygon parse_polygon(const std::string& text) {
  star::synth::Polygon p;
  std::stringstream ss(text);
  std::string vertex;
  while (std::getline(ss, vertex, ';')) {
    const auto xy = split_numbers(vertex, ',', 2, "--polygon");
    p.vertices.emplace_back(xy[0], xy[1]);
  }
  if (p.vertices.size() < 3) fail(ErrorKind::parameter, "--polygon needs at least three 'x,y' vertices");
  return p;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void inspect(const std::string& path) {
  const auto g = star::io::read_raster(path);
  const auto& s = g.spec();
  double lo = INFINITY;
  double hi = -INFINITY;
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.valid_at(i)) continue;
    const double v = g.values()[i];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
    ++n;
  }
  fmt::print("file:      {}\n", path);
  fmt::print("size:      {} x {}\n", s.width, s.height);
  fmt::print("crs:       {}\n", s.crs_id.empty() ? "(none)" : s.crs_id);
  fmt::print("transform: origin=({}, {}) pixel=({}, {})\n", s.transform.origin_x, s.transform.origin_y,
             s.transform.pixel_w, s.transform.pixel_h);
  fmt::print("units:     {}\n", star::to_string(g.units()));
  fmt::print("valid:     {} / {}\n", n, g.size());
  if (n > 0) fmt::print("range:     [{}, {}] mean {}\n", lo, hi, sum / static_cast<double>(n));
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("star"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"STAR Sentinel-1 preprocessing and flood mapping"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string cube_dir = "cube";
  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 0;
  bool quiet = false;
  app.add_option("--cube", cube_dir, "Cube directory")->capture_default_str();
  app.add_option("--config", config_path, "Pipeline config file (key = value)");
  app.add_option("--seed", seed, "Random seed for synthetic scenes")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Copy a scene into the cube and record its manifest");
  std::string meta_json;
  star::cube::SceneManifest meta;
  std::string acquired;
  std::string pass = "ASC";
  std::string vv;
  std::string vh;
  std::string angle;
  ingest->add_option("--meta", meta_json, "Scene manifest JSON; flags below override its fields");
  ingest->add_option("--scene-id", meta.scene_id, "Scene identifier");
  ingest->add_option("--acquired", acquired, "Acquisition time (YYYY-MM-DD[THH:MM:SSZ])");
  ingest->add_option("--pass", pass, "Orbit pass (ASC|DESC)");
  ingest->add_option("--orbit", meta.relative_orbit, "Relative orbit number");
  ingest->add_option("--vv", vv, "VV backscatter raster (.tif or .sgrd)");
  ingest->add_option("--vh", vh, "VH backscatter raster");
  ingest->add_option("--angle", angle, "Incidence angle raster");
  ingest->add_option("--crs", meta.crs_id, "CRS id such as EPSG:32632 (required when the files carry none)");
  ingest->add_option("--looks", meta.looks, "Equivalent number of looks");
  ingest->add_option("--width", meta.width, "Declared width in pixels");
  ingest->add_option("--height", meta.height, "Declared height in pixels");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a speckled synthetic scene into the cube");
  star::synth::SynthSpec spec;
  std::string synth_acquired = "2022-01-01";
  std::string synth_pass = "ASC";
  std::vector<std::string> rects;
  std::vector<std::string> polygons;
  std::vector<std::string> targets;
  std::string slope;
  synth->add_option("--scene-id", spec.scene_id, "Scene identifier")->required();
  synth->add_option("--acquired", synth_acquired, "Acquisition time")->capture_default_str();
  synth->add_option("--pass", synth_pass, "Orbit pass (ASC|DESC)")->capture_default_str();
  synth->add_option("--orbit", spec.relative_orbit, "Relative orbit number")->capture_default_str();
  synth->add_option("--width", spec.width, "Width in pixels")->capture_default_str();
  synth->add_option("--height", spec.height, "Height in pixels")->capture_default_str();
  synth->add_option("--pixel-m", spec.pixel_m, "Pixel size in metres")->capture_default_str();
  synth->add_option("--land-db", spec.land_db, "Land backscatter (dB)")->capture_default_str();
  synth->add_option("--water-db", spec.water_db, "Water backscatter (dB)")->capture_default_str();
  synth->add_option("--looks", spec.looks, "Speckle looks L")->capture_default_str();
  synth->add_option("--water-rect", rects, "Water rectangle x0,y0,x1,y1 in pixels (repeatable)");
  synth->add_option("--water-polygon", polygons, "Water polygon 'x,y;x,y;...' in pixels (repeatable)");
  synth->add_option("--slope", slope, "DEM plane gradient gx,gy (metres per metre)");
  synth->add_option("--border-noise", spec.border_noise_cols, "Border-noise columns on the left edge");
  synth->add_option("--target", targets, "Point target x,y,db (repeatable)");

  // run
  auto* run = app.add_subcommand("run", "Run the pipeline over the cube");
  std::string run_id;
  std::string pre_window;
  std::string during_window;
  run->add_option("--run-id", run_id, "Run identifier (default: derived from the config)");
  run->add_option("--pre", pre_window, "Pre-event window, overrides window.pre");
  run->add_option("--during", during_window, "Event window, overrides window.during");

  // report
  auto* report = app.add_subcommand("report", "Print the flood report and provenance of a run");
  std::string report_id;
  report->add_option("--run-id", report_id, "Run identifier")->required();

  // inspect
  auto* inspect_cmd = app.add_subcommand("inspect", "Describe a raster file");
  std::string raster;
  inspect_cmd->add_option("raster", raster, "Raster path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : star::exit_code(ErrorKind::config);
  }
  if (quiet) spdlog::set_level(spdlog::level::warn);

  try {
    star::set_thread_count(threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency()));

    if (*ingest) {
      star::cube::SceneManifest m = meta_json.empty() ? star::cube::SceneManifest{}
                                                      : star::cube::manifest_from_json(read_file(meta_json));
      if (!meta.scene_id.empty()) m.scene_id = meta.scene_id;
      if (!acquired.empty()) m.acquired = star::parse_utc(acquired);
      if (ingest->count("--pass") > 0 || meta_json.empty()) m.orbit_pass = star::parse_orbit_pass(pass);
      if (ingest->count("--orbit") > 0) m.relative_orbit = meta.relative_orbit;
      if (!meta.crs_id.empty()) m.crs_id = meta.crs_id;
      if (ingest->count("--looks") > 0) m.looks = meta.looks;
      if (ingest->count("--width") > 0) m.width = meta.width;
      if (ingest->count("--height") > 0) m.height = meta.height;
      if (!vv.empty()) m.bands["VV"] = vv;
      if (!vh.empty()) m.bands["VH"] = vh;
      if (!angle.empty()) m.bands["angle"] = angle;
      if (meta_json.empty() && acquired.empty()) fail(ErrorKind::ingest, "ingest: acquired: missing");
      star::cube::Cube cube(cube_dir);
      const auto out = star::cube::ingest(cube, m);
      fmt::print("ingested {} ({}x{}, {})\n", out.scene_id, out.width, out.height, out.crs_id);
    } else if (*synth) {
      spec.seed = seed;
      spec.acquired = star::parse_utc(synth_acquired);
      spec.orbit_pass = star::parse_orbit_pass(synth_pass);
      for (const auto& r : rects) {
        const auto v = split_numbers(r, ',', 4, "--water-rect");
        spec.water.push_back(star::synth::Polygon::rect(v[0], v[1], v[2], v[3]));
      }
      for (const auto& p : polygons) spec.water.push_back(parse_polygon(p));
      if (!slope.empty()) {
        const auto g = split_numbers(slope, ',', 2, "--slope");
        spec.slope = star::synth::SlopePlane{g[0], g[1]};
      }
      for (const auto& t : targets) {
        const auto v = split_numbers(t, ',', 3, "--target");
        spec.targets.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]), v[2]});
      }
      star::cube::Cube cube(cube_dir);
      const auto out = star::synth::write_to_cube(cube, spec);
      fmt::print("synthesized {} ({}x{}, seed {})\n", out.scene_id, out.width, out.height, seed);
    } else if (*run) {
      star::PipelineConfig cfg = config_path.empty() ? star::PipelineConfig{} : star::load_config(config_path);
      if (!pre_window.empty()) cfg.window_pre = pre_window;
      if (!during_window.empty()) cfg.window_during = during_window;
      cfg.validate();
      if (run_id.empty()) run_id = star::default_run_id(cfg);
      star::cube::Cube cube(cube_dir);
      const auto result = star::run_pipeline(cfg, cube, run_id);
      fmt::print("run {}: threshold {:.4f} dB ({})\n", result.run_id, result.threshold_db, result.threshold_source);
      fmt::print("{}\n{}\n", star::flood::report_csv_header(), star::flood::report_csv_row(result.report));
    } else if (*report) {
      const star::cube::Cube cube(cube_dir);
      fmt::print("{}", star::report(cube, report_id));
    } else if (*inspect_cmd) {
      inspect(raster);
    }
  } catch (const star::Error& e) {
    spdlog::error("{}", e.what());
    return star::exit_code(e.kind());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return star::exit_code(ErrorKind::io);
  }
  return 0;
}
