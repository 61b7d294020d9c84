#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace star {

enum class Units { dB, linear, degrees, meters, dimensionless };

std::string_view to_string(Units u);
Units parse_units(std::string_view s);

/// Affine north-up transform: x = origin_x + col * pixel_w, y = origin_y + row * pixel_h.
struct GeoTransform {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double pixel_w = 1.0;
  double pixel_h = -1.0;

  bool operator==(const GeoTransform&) const = default;
};

/// Geometry of a grid: dimensions, transform and CRS. Also the target of resampling.
struct GridSpec {
  int width = 0;
  int height = 0;
  GeoTransform transform;
  std::string crs_id;

  std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  bool operator==(const GridSpec&) const = default;
};

/// Throws a parameter error if dims are non-positive or the transform is degenerate.
void validate(const GridSpec& spec);

/// True when both grids have identical dims and CRS and transforms agree to 1e-9 of a pixel.
bool co_registered(const GridSpec& a, const GridSpec& b);

/// Throws an alignment error naming `what` unless the grids are co-registered.
void require_co_registered(const GridSpec& a, const GridSpec& b, std::string_view what);

/// Single-band float64 raster with a per-pixel validity mask. Invalid pixels carry
/// no meaning in `values` and are excluded from every statistic derived from the grid.
class RasterGrid {
 public:
  RasterGrid() = default;
  RasterGrid(GridSpec spec, Units units, double fill = 0.0);
  RasterGrid(GridSpec spec, Units units, std::vector<double> values);
  RasterGrid(GridSpec spec, Units units, std::vector<double> values, std::vector<std::uint8_t> valid);

  const GridSpec& spec() const { return spec_; }
  int width() const { return spec_.width; }
  int height() const { return spec_.height; }
  std::size_t size() const { return values_.size(); }
  Units units() const { return units_; }
  void set_units(Units u) { units_ = u; }
  void set_crs(std::string crs) { spec_.crs_id = std::move(crs); }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(spec_.width) + static_cast<std::size_t>(x);
  }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < spec_.width && y < spec_.height; }

  double at(int x, int y) const { return values_[index(x, y)]; }
  double& at(int x, int y) { return values_[index(x, y)]; }
  bool valid(int x, int y) const { return valid_[index(x, y)] != 0; }
  bool valid_at(std::size_t i) const { return valid_[i] != 0; }
  void set(int x, int y, double v) {
    values_[index(x, y)] = v;
    valid_[index(x, y)] = 1;
  }
  void invalidate(int x, int y) { valid_[index(x, y)] = 0; }
  void invalidate_at(std::size_t i) { valid_[i] = 0; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::span<const std::uint8_t> valid_mask() const { return valid_; }
  std::span<std::uint8_t> valid_mask() { return valid_; }

  std::size_t valid_count() const;

  /// Checks length and unit invariants (linear grids must be strictly positive where valid).
  void check_invariants() const;

 private:
  GridSpec spec_;
  Units units_ = Units::dimensionless;
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
};

/// Grid of {0,1} values with its own validity mask.
class BinaryMask {
 public:
  BinaryMask() = default;
  explicit BinaryMask(GridSpec spec);
  BinaryMask(GridSpec spec, std::vector<std::uint8_t> bits);
  BinaryMask(GridSpec spec, std::vector<std::uint8_t> bits, std::vector<std::uint8_t> valid);

  const GridSpec& spec() const { return spec_; }
  int width() const { return spec_.width; }
  int height() const { return spec_.height; }
  std::size_t size() const { return bits_.size(); }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(spec_.width) + static_cast<std::size_t>(x);
  }

  bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool on) { bits_[index(x, y)] = on ? 1 : 0; }
  bool valid(int x, int y) const { return valid_[index(x, y)] != 0; }
  void set_valid(int x, int y, bool v) { valid_[index(x, y)] = v ? 1 : 0; }

  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<std::uint8_t> bits() { return bits_; }
  std::span<const std::uint8_t> valid_mask() const { return valid_; }
  std::span<std::uint8_t> valid_mask() { return valid_; }

  /// Number of valid pixels set to 1.
  std::size_t count() const;

  /// 0/1 values as a dimensionless grid; validity carried over.
  RasterGrid to_grid() const;
  /// Rejects any valid value outside {0,1}.
  static BinaryMask from_grid(const RasterGrid& grid);

  bool operator==(const BinaryMask&) const = default;

 private:
  GridSpec spec_;
  std::vector<std::uint8_t> bits_;
  std::vector<std::uint8_t> valid_;
};

enum class KernelShape { square, circle };

/// (2r+1)^2 weight matrix anchored at its centre.
class Kernel {
 public:
  static Kernel square(int radius, bool normalize = true);
  /// Weights are zero where the pixel-centre distance exceeds the radius.
  static Kernel circle(int radius, bool normalize = true);
  static Kernel identity();
  static Kernel custom(int radius, std::vector<double> weights, bool normalize);

  int radius() const { return radius_; }
  int size() const { return 2 * radius_ + 1; }
  KernelShape shape() const { return shape_; }
  bool normalized() const { return normalized_; }
  double weight(int dx, int dy) const {
    return weights_[static_cast<std::size_t>((dy + radius_) * size() + (dx + radius_))];
  }
  std::span<const double> weights() const { return weights_; }
  double sum() const;

 private:
  Kernel(int radius, KernelShape shape, std::vector<double> weights, bool normalize);

  int radius_ = 0;
  KernelShape shape_ = KernelShape::square;
  std::vector<double> weights_;
  bool normalized_ = false;
};

enum class OrbitPass { ASC, DESC };
enum class Polarization { VV, VH };

std::string_view to_string(OrbitPass p);
std::string_view to_string(Polarization p);
OrbitPass parse_orbit_pass(std::string_view s);
Polarization parse_polarization(std::string_view s);

using Timestamp = std::chrono::sys_seconds;

struct StackLayer {
  RasterGrid grid;
  Timestamp timestamp{};
  OrbitPass orbit_pass = OrbitPass::ASC;
  int relative_orbit = 0;
  Polarization polarization = Polarization::VV;
};

/// Co-registered layers ordered by acquisition time.
class TimeStack {
 public:
  TimeStack() = default;
  /// Validates shared geometry/units and non-decreasing timestamps.
  explicit TimeStack(std::vector<StackLayer> layers);

  bool empty() const { return layers_.empty(); }
  std::size_t size() const { return layers_.size(); }
  const StackLayer& operator[](std::size_t i) const { return layers_[i]; }
  const std::vector<StackLayer>& layers() const { return layers_; }
  const GridSpec& spec() const;
  Units units() const;

 private:
  std::vector<StackLayer> layers_;
};

}  // namespace star
