#pragma once

#include <filesystem>
#include <string>

#include "star/config.hpp"
#include "star/cube.hpp"
#include "star/floodmap.hpp"

namespace star {

struct RunResult {
  std::string run_id;
  std::filesystem::path run_dir;
  flood::FloodReport report;
  double threshold_db = 0.0;
  std::string threshold_source;  ///< chessboard | global_otsu | fixed
};

/// Deterministic run id derived from the canonical config text.
std::string default_run_id(const PipelineConfig& config);

/// Runs the per-scene step chain, the per-window composites, thresholding and flood
/// extraction. Everything lands under cube/derived/<run_id>/, which is replaced if it
/// exists. Step failures are rethrown with the step name and scene id; files written
/// before the failure are kept.
RunResult run_pipeline(const PipelineConfig& config, cube::Cube& cube, const std::string& run_id);

/// FloodReport CSV followed by a per-step provenance table. Unknown run ids raise
/// ErrorKind::not_found.
std::string report(const cube::Cube& cube, const std::string& run_id);

}  // namespace star
