#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "star/objects.hpp"
#include "star/raster.hpp"

namespace star::flood {

/// Binned counts over strictly increasing edges. Values outside [edges.front(), edges.back()]
/// are not counted; a value equal to the last edge falls in the last bin.
class Histogram {
 public:
  Histogram(std::vector<double> edges, std::vector<std::uint64_t> counts);
  static Histogram uniform(double lo, double hi, int bins);

  void add(double value);
  /// Adds every valid pixel of the grid.
  void add(const RasterGrid& grid);
  /// Adds the valid pixels of the window [x0, x1) x [y0, y1).
  void add(const RasterGrid& grid, int x0, int y0, int x1, int y1);
  /// Bin-wise sum; edges must match exactly.
  void merge(const Histogram& other);

  int bins() const { return static_cast<int>(counts_.size()); }
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total() const;
  int nonempty_bins() const;
  /// True when every bin has the same width (to 1e-9 relative).
  bool uniform_bins() const { return uniform_; }

 private:
  std::vector<double> edges_;
  std::vector<std::uint64_t> counts_;
  bool uniform_ = false;
};

struct OtsuResult {
  double threshold = 0.0;  ///< edge separating the classes; class 0 lies below it
  int cut = 0;             ///< bin index of the threshold edge, in [1, bins-1]
  double between_class_variance = 0.0;
  double total_variance = 0.0;
  double bimodality = 0.0;  ///< between / total, in [0, 1]
  std::uint64_t below = 0;
  std::uint64_t above = 0;
};

/// Exhaustive Otsu over all bin cut points; the lowest threshold wins ties. Class means use
/// bin centres (exact integer index sums when bins are uniform).
OtsuResult otsu(const Histogram& hist);

struct ChessboardParams {
  int cell_px = 64;
  double bimodality_min = 0.75;
  int bins = 256;
  double lo_db = -30.0;
  double hi_db = 15.0;
  /// Minimum share of a cell's pixels in each Otsu class for the cell to be selected.
  double class_floor = 0.10;

  void validate() const;
};

struct ChessboardResult {
  OtsuResult otsu;
  int cells_total = 0;
  int cells_selected = 0;
  std::vector<int> selected;  ///< row-major cell indices
};

/// Tiles the grid into cell_px squares, keeps bimodal cells with both classes above the
/// floor, and thresholds the aggregate of their histograms.
ChessboardResult chessboard_otsu(const RasterGrid& grid, const ChessboardParams& params);

/// value < threshold on valid pixels, steep pixels cleared, then components smaller than
/// min_pixels removed. Invalid input pixels are 0 and invalid.
BinaryMask water_mask(const RasterGrid& grid, double threshold_db, const BinaryMask* steep, int min_pixels,
                      objects::Connectivity conn = objects::Connectivity::eight);

struct FloodReport {
  std::string date_pre;
  std::string date_during;
  std::uint64_t permanent_water_px = 0;
  std::uint64_t during_water_px = 0;
  std::uint64_t flood_px = 0;
  double pixel_area_m2 = 0.0;
  double permanent_km2 = 0.0;
  double during_km2 = 0.0;
  double flood_km2 = 0.0;
};

struct FloodExtent {
  FloodReport report;
  BinaryMask flood;  ///< during AND NOT pre
};

FloodExtent flood_extent(const BinaryMask& pre, const BinaryMask& during, double pixel_area_m2,
                         std::string date_pre = {}, std::string date_during = {});

/// The eight report columns, comma separated, no trailing newline.
std::string report_csv_header();
std::string report_csv_row(const FloodReport& r);

}  // namespace star::flood
