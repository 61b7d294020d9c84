#include "star/synth.hpp"

#include <cmath>
#include <random>

#include "star/error.hpp"
#include "star/io.hpp"

namespace star::synth {

Polygon Polygon::rect(double x0, double y0, double x1, double y1) { return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}}; }

bool Polygon::contains(double x, double y) const {
  // Even-odd ray casting.
  bool inside = false;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto [xi, yi] = vertices[i];
    const auto [xj, yj] = vertices[j];
    if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) inside = !inside;
  }
  return inside;
}

GridSpec SynthSpec::grid() const { return {width, height, {origin_x, origin_y, pixel_m, -pixel_m}, crs_id}; }

SynthScene generate(const SynthSpec& spec) {
  require(spec.width > 0 && spec.height > 0, ErrorKind::parameter, "synthetic scene dims must be positive");
  require(spec.pixel_m > 0.0, ErrorKind::parameter, "pixel size must be positive");
  require(spec.looks > 0.0, ErrorKind::parameter, "looks must be positive");
  require(spec.border_noise_cols >= 0 && spec.border_noise_cols <= spec.width, ErrorKind::parameter,
          "border_noise_cols out of range");
  const GridSpec grid = spec.grid();
  if (spec.water_mask) {
    require(spec.water_mask->width() == spec.width && spec.water_mask->height() == spec.height, ErrorKind::parameter,
            "water mask is " + std::to_string(spec.water_mask->width()) + "x" +
                std::to_string(spec.water_mask->height()) + ", scene is " + std::to_string(spec.width) + "x" +
                std::to_string(spec.height));
  }

  SynthScene out{RasterGrid(grid, Units::dB), RasterGrid(grid, Units::dB), RasterGrid(grid, Units::degrees),
                 BinaryMask(grid), RasterGrid(grid, Units::meters)};
  std::mt19937_64 rng(spec.seed);
  std::gamma_distribution<double> speckle(spec.looks, 1.0 / spec.looks);

  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      bool wet = spec.water_mask && spec.water_mask->at(x, y) && spec.water_mask->valid(x, y);
      for (const auto& p : spec.water) wet = wet || p.contains(x + 0.5, y + 0.5);
      out.water.set(x, y, wet);

      const bool border = x < spec.border_noise_cols;
      const double truth = border ? spec.border_noise_db : (wet ? spec.water_db : spec.land_db);
      out.truth_db.set(x, y, truth);
      // One draw per pixel in scan order keeps the noise field independent of the layout.
      const double s = speckle(rng);
      out.observed_db.set(x, y, 10.0 * std::log10(std::pow(10.0, truth / 10.0) * s));

      const double t = spec.width > 1 ? static_cast<double>(x) / (spec.width - 1) : 0.0;
      out.angle.set(x, y, border ? spec.border_noise_angle_deg
                                 : spec.angle_near_deg + t * (spec.angle_far_deg - spec.angle_near_deg));

      if (spec.slope) {
        const double e = (x + 0.5) * spec.pixel_m;
        const double n = -(y + 0.5) * spec.pixel_m;
        out.dem.set(x, y, spec.slope->gx * e + spec.slope->gy * n);
      }
    }
  }
  for (const auto& t : spec.targets) {
    require(out.truth_db.in_bounds(t.x, t.y), ErrorKind::parameter, "point target outside the scene");
    out.truth_db.set(t.x, t.y, t.db);
    out.observed_db.set(t.x, t.y, t.db);
  }
  return out;
}

cube::SceneManifest write_to_cube(cube::Cube& cube, const SynthSpec& spec) {
  const SynthScene scene = generate(spec);
  cube::SceneManifest m;
  m.scene_id = spec.scene_id;
  m.acquired = spec.acquired;
  m.orbit_pass = spec.orbit_pass;
  m.relative_orbit = spec.relative_orbit;
  m.crs_id = spec.crs_id;
  m.transform = spec.grid().transform;
  m.looks = spec.looks;
  m.width = spec.width;
  m.height = spec.height;

  // Stage through ingest so synthetic scenes take exactly the path of real ones.
  const auto staging = cube.root() / ".staging" / spec.scene_id;
  std::filesystem::create_directories(staging);
  io::write_geotiff(staging / "VV.tif", scene.observed_db);
  io::write_geotiff(staging / "angle.tif", scene.angle);
  m.bands = {{"VV", (staging / "VV.tif").string()}, {"angle", (staging / "angle.tif").string()}};
  cube::SceneManifest ingested = cube::ingest(cube, m);
  std::filesystem::remove_all(cube.root() / ".staging");

  io::write_mask_geotiff(cube.scene_dir(spec.scene_id) / "truth.tif", scene.water);
  io::write_geotiff(cube.root() / "dem.tif", scene.dem);
  return ingested;
}

}  // namespace star::synth
