#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "star/calibration.hpp"
#include "star/cube.hpp"
#include "star/error.hpp"
#include "star/io.hpp"
#include "star/time.hpp"

namespace star::cube {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kBandNames{"VV", "VH", "angle"};

json to_object(const SceneManifest& m) {
  json bands = json::object();
  for (const auto& [k, v] : m.bands) bands[k] = v;
  return json{
      {"scene_id", m.scene_id},
      {"acquired", format_utc(m.acquired)},
      {"orbit_pass", std::string(to_string(m.orbit_pass))},
      {"relative_orbit", m.relative_orbit},
      {"bands", bands},
      {"crs_id", m.crs_id},
      {"transform",
       {{"origin_x", m.transform.origin_x},
        {"origin_y", m.transform.origin_y},
        {"pixel_w", m.transform.pixel_w},
        {"pixel_h", m.transform.pixel_h}}},
      {"looks", m.looks},
      {"width", m.width},
      {"height", m.height},
  };
}

SceneManifest from_object(const json& j) {
  SceneManifest m;
  try {
    m.scene_id = j.at("scene_id").get<std::string>();
    m.acquired = parse_utc(j.at("acquired").get<std::string>());
    m.orbit_pass = parse_orbit_pass(j.at("orbit_pass").get<std::string>());
    m.relative_orbit = j.value("relative_orbit", 0);
    for (const auto& [k, v] : j.at("bands").items()) m.bands[k] = v.get<std::string>();
    m.crs_id = j.value("crs_id", std::string{});
    if (j.contains("transform")) {
      const auto& t = j.at("transform");
      m.transform = {t.at("origin_x").get<double>(), t.at("origin_y").get<double>(), t.at("pixel_w").get<double>(),
                     t.at("pixel_h").get<double>()};
    }
    m.looks = j.value("looks", 4.4);
    m.width = j.value("width", 0);
    m.height = j.value("height", 0);
  } catch (const json::exception& e) {
    fail(ErrorKind::ingest, std::string("malformed scene manifest: ") + e.what());
  }
  return m;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::io, "cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, p);
}

[[noreturn]] void ingest_error(const std::string& field, const std::string& what) {
  fail(ErrorKind::ingest, "ingest: " + field + ": " + what);
}

std::string dims(int w, int h) { return std::to_string(w) + "x" + std::to_string(h); }

}  // namespace

std::string to_json(const SceneManifest& m) { return to_object(m).dump(2) + "\n"; }

SceneManifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::ingest, std::string("manifest is not valid JSON: ") + e.what());
  }
  return from_object(j);
}

Cube::Cube(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "scenes", ec);
  require(!ec, ErrorKind::io, "cannot create cube at " + root_.string() + ": " + ec.message());
}

std::vector<SceneManifest> Cube::scenes() const {
  const fs::path p = root_ / "manifest.json";
  if (!fs::exists(p)) return {};
  json j;
  try {
    j = json::parse(slurp(p));
  } catch (const json::exception& e) {
    fail(ErrorKind::io, p.string() + ": " + e.what());
  }
  std::vector<SceneManifest> out;
  for (const auto& s : j.at("scenes")) out.push_back(from_object(s));
  return out;
}

bool Cube::has_scene(const std::string& scene_id) const {
  const auto all = scenes();
  return std::any_of(all.begin(), all.end(), [&](const auto& m) { return m.scene_id == scene_id; });
}

SceneManifest Cube::scene(const std::string& scene_id) const {
  for (auto& m : scenes()) {
    if (m.scene_id == scene_id) return m;
  }
  fail(ErrorKind::not_found, "scene '" + scene_id + "' is not in the cube");
}

void Cube::put(const SceneManifest& manifest) {
  auto all = scenes();
  std::erase_if(all, [&](const auto& m) { return m.scene_id == manifest.scene_id; });
  all.push_back(manifest);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.scene_id < b.scene_id; });
  json list = json::array();
  for (const auto& m : all) list.push_back(to_object(m));
  fs::create_directories(scene_dir(manifest.scene_id));
  write_text(scene_dir(manifest.scene_id) / "meta.json", to_json(manifest));
  write_text(root_ / "manifest.json", json{{"scenes", list}}.dump(2) + "\n");
}

RasterGrid Cube::load_band(const SceneManifest& manifest, const std::string& band) const {
  const auto it = manifest.bands.find(band);
  require(it != manifest.bands.end(), ErrorKind::not_found,
          "scene '" + manifest.scene_id + "' has no " + band + " band");
  RasterGrid g = io::read_raster(scene_dir(manifest.scene_id) / it->second);
  require(g.width() == manifest.width && g.height() == manifest.height, ErrorKind::ingest,
          "scene '" + manifest.scene_id + "' band " + band + " is " + dims(g.width(), g.height()) +
              " but the manifest declares " + dims(manifest.width, manifest.height));
  return g;
}

SceneManifest ingest(Cube& cube, const SceneManifest& metadata) {
  const auto& id = metadata.scene_id;
  if (id.empty() || !std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
      }) || id == "." || id == "..") {
    ingest_error("scene_id", "must be a non-empty name of [A-Za-z0-9_.-]");
  }
  if (!metadata.bands.contains("VV") && !metadata.bands.contains("VH")) {
    ingest_error("bands", "at least one of VV or VH is required");
  }
  for (const auto& [name, path] : metadata.bands) {
    if (std::find(kBandNames.begin(), kBandNames.end(), name) == kBandNames.end()) {
      ingest_error("bands", "unknown band '" + name + "' (expected VV, VH or angle)");
    }
  }
  if (!(metadata.looks > 0.0)) ingest_error("looks", "must be positive");

  SceneManifest out = metadata;
  std::map<std::string, RasterGrid> grids;
  std::string first;
  for (const auto& [name, path] : metadata.bands) {
    RasterGrid g;
    try {
      g = io::read_raster(path);
    } catch (const Error& e) {
      ingest_error("bands." + name, e.what());
    }
    const std::string where = "bands." + name + " (" + path + ")";
    if (metadata.width > 0 || metadata.height > 0) {
      if (g.width() != metadata.width || g.height() != metadata.height) {
        ingest_error("dims", "declared " + dims(metadata.width, metadata.height) + " but " + where + " is " +
                                 dims(g.width(), g.height()));
      }
    }
    if (!metadata.crs_id.empty() && !g.spec().crs_id.empty() && g.spec().crs_id != metadata.crs_id) {
      ingest_error("crs_id", "declared " + metadata.crs_id + " but " + where + " is " + g.spec().crs_id);
    }
    if (g.spec().crs_id.empty()) {
      if (metadata.crs_id.empty()) ingest_error("crs_id", "missing from metadata and from " + where);
      g.set_crs(metadata.crs_id);
    }
    if (metadata.transform != GeoTransform{}) {
      GridSpec declared = g.spec();
      declared.transform = metadata.transform;
      if (!co_registered(declared, g.spec())) ingest_error("transform", "declared transform differs from " + where);
    }
    if (name == "angle") {
      g.set_units(Units::degrees);
    } else if (g.units() == Units::linear) {
      g = calib::to_db(g);
    } else {
      g.set_units(Units::dB);
    }
    if (first.empty()) {
      first = name;
    } else if (!co_registered(grids.at(first).spec(), g.spec())) {
      ingest_error("bands." + name, "not co-registered with bands." + first);
    }
    grids.emplace(name, std::move(g));
  }

  const GridSpec& spec = grids.at(first).spec();
  out.width = spec.width;
  out.height = spec.height;
  out.crs_id = spec.crs_id;
  out.transform = spec.transform;

  if (cube.has_scene(id) || fs::exists(cube.scene_dir(id))) {
    spdlog::warn("scene '{}' already in cube {}; overwriting", id, cube.root().string());
    fs::remove_all(cube.scene_dir(id));
  }
  fs::create_directories(cube.scene_dir(id));
  out.bands.clear();
  for (const auto& [name, g] : grids) {
    const std::string file = name + ".tif";
    io::write_geotiff(cube.scene_dir(id) / file, g);
    out.bands[name] = file;
  }
  cube.put(out);
  return out;
}

}  // namespace star::cube
