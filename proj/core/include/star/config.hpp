#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "star/calibration.hpp"
#include "star/floodmap.hpp"
#include "star/focal.hpp"
#include "star/objects.hpp"
#include "star/speckle.hpp"
#include "star/temporal.hpp"
#include "star/terrain.hpp"

namespace star {

enum class Step { mask_border_angle, mask_extremes, to_linear, speckle, flatten, slope_mask, to_db, smooth };

std::string_view to_string(Step s);
Step parse_step(std::string_view s);

/// Canonical per-scene order.
const std::vector<Step>& default_steps();
/// Every step in canonical order, used to report skipped steps.
const std::vector<Step>& all_steps();

enum class OtsuInput { smoothed, unsmoothed };

struct PipelineConfig {
  std::vector<Step> steps = default_steps();
  std::string window_pre;
  std::string window_during;

  calib::AngleRange angle;
  calib::DbRange db;

  speckle::Filter filter = speckle::Filter::lee_sigma;
  speckle::Filter base_filter = speckle::Filter::lee;
  speckle::SpeckleParams speckle{.looks = 4.4, .radius = 3};

  terrain::Model terrain_model = terrain::Model::direct;
  double max_slope_deg = 15.0;
  std::string dem_path = "dem.tif";  ///< relative paths resolve against the cube root
  double heading_asc_deg = 348.0;
  double heading_desc_deg = 192.0;

  objects::Connectivity connectivity = objects::Connectivity::eight;
  int min_pixels = 8;

  int smooth_radius = 1;
  std::string smooth_shape = "square";  ///< square | circle
  objects::SmoothMode smooth_mode = objects::SmoothMode::mean;

  temporal::Stat composite_stat = temporal::Stat::median;
  int window_days = 12;
  bool per_pass = true;

  int cell_px = 64;
  double bimodality_min = 0.75;
  int bins = 256;
  double fallback_db = -16.0;
  OtsuInput otsu_input = OtsuInput::smoothed;
  Polarization polarization = Polarization::VV;

  std::optional<MetersPerDegree> per_degree;

  /// Parameter ranges plus step-order unit discipline. Throws ErrorKind::config.
  void validate() const;

  flood::ChessboardParams chessboard() const;
  Kernel smoothing_kernel() const;
};

/// Flat "key = value" lines; '#' starts a comment. Unknown keys, duplicates and malformed
/// values raise ErrorKind::config. The result is validated.
PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Canonical "key = value" rendering of every key, one per line.
std::string to_text(const PipelineConfig& config);

}  // namespace star
