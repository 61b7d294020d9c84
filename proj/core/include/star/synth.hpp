#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "star/cube.hpp"
#include "star/raster.hpp"

namespace star::synth {

/// Closed polygon in pixel coordinates (x right, y down); a pixel is inside when its
/// centre is.
struct Polygon {
  std::vector<std::pair<double, double>> vertices;

  static Polygon rect(double x0, double y0, double x1, double y1);
  bool contains(double x, double y) const;
};

/// Bright scatterer written without speckle.
struct PointTarget {
  int x = 0;
  int y = 0;
  double db = 10.0;
};

/// DEM plane z = gx * easting + gy * northing (metres per metre, relative to the origin).
struct SlopePlane {
  double gx = 0.0;
  double gy = 0.0;
};

struct SynthSpec {
  std::string scene_id = "synth";
  Timestamp acquired{};
  OrbitPass orbit_pass = OrbitPass::ASC;
  int relative_orbit = 1;

  int width = 512;
  int height = 512;
  double pixel_m = 10.0;
  std::string crs_id = "EPSG:32632";
  double origin_x = 500000.0;
  double origin_y = 5000000.0;

  double land_db = -8.0;
  double water_db = -22.0;
  double looks = 4.0;

  /// Water is the union of the polygons and of water_mask (if given; dims must match).
  std::vector<Polygon> water;
  std::optional<BinaryMask> water_mask;

  std::optional<SlopePlane> slope;
  std::vector<PointTarget> targets;

  /// Incidence angle ramps linearly from near (column 0) to far (last column).
  double angle_near_deg = 32.0;
  double angle_far_deg = 45.0;
  /// Leftmost columns emulating GRD border noise: very low backscatter at an angle below
  /// the default mask range.
  int border_noise_cols = 0;
  double border_noise_db = -40.0;
  double border_noise_angle_deg = 29.0;

  std::uint64_t seed = 0;

  GridSpec grid() const;
};

struct SynthScene {
  RasterGrid truth_db;     ///< noise-free backscatter
  RasterGrid observed_db;  ///< truth x Gamma(L, 1/L) speckle, in dB
  RasterGrid angle;        ///< degrees
  BinaryMask water;        ///< planted water
  RasterGrid dem;          ///< metres; flat unless a slope plane is given
};

/// Deterministic for a given spec (including seed).
SynthScene generate(const SynthSpec& spec);

/// Generates the scene and writes it into the cube: VV.tif, angle.tif, truth.tif (planted
/// water mask) and meta.json under scenes/<id>/, plus dem.tif at the cube root.
cube::SceneManifest write_to_cube(cube::Cube& cube, const SynthSpec& spec);

}  // namespace star::synth
