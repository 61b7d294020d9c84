#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "star/raster.hpp"

namespace star::cube {

/// Acquisition metadata binding band files to a scene. Band paths are relative to the scene
/// directory once ingested; before ingest they point at the source files.
struct SceneManifest {
  std::string scene_id;
  Timestamp acquired{};
  OrbitPass orbit_pass = OrbitPass::ASC;
  int relative_orbit = 0;
  std::map<std::string, std::string> bands;  ///< keys "VV", "VH", "angle"
  std::string crs_id;
  GeoTransform transform;
  double looks = 4.4;
  int width = 0;   ///< declared dims; 0 means "take from the file"
  int height = 0;

  GridSpec spec() const { return {width, height, transform, crs_id}; }
  bool operator==(const SceneManifest&) const = default;
};

std::string to_json(const SceneManifest& m);
SceneManifest manifest_from_json(const std::string& text);

/// One AOI on disk:
///   manifest.json                 list of scene manifests, sorted by scene_id
///   scenes/<id>/{VV,VH,angle}.tif plus meta.json
///   derived/<run>/<step>/...      pipeline outputs
class Cube {
 public:
  /// Opens (and creates, if needed) the directory layout under root.
  explicit Cube(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path scene_dir(const std::string& scene_id) const { return root_ / "scenes" / scene_id; }
  std::filesystem::path run_dir(const std::string& run_id) const { return root_ / "derived" / run_id; }

  std::vector<SceneManifest> scenes() const;
  bool has_scene(const std::string& scene_id) const;
  SceneManifest scene(const std::string& scene_id) const;

  /// Writes meta.json and the manifest entry; replaces an existing entry with the same id.
  void put(const SceneManifest& manifest);

  /// Reads a band ("VV", "VH" or "angle") of an ingested scene.
  RasterGrid load_band(const SceneManifest& manifest, const std::string& band) const;

 private:
  std::filesystem::path root_;
};

/// Validates the source rasters against the metadata and copies them into the cube as
/// GeoTIFF. Missing crs_id/transform/dims are taken from the files; disagreements and a
/// CRS absent from both raise ErrorKind::ingest naming the field. Re-ingesting an existing
/// scene_id overwrites it with a warning.
SceneManifest ingest(Cube& cube, const SceneManifest& metadata);

}  // namespace star::cube
