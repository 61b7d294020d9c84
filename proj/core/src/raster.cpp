#include "star/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "star/error.hpp"

namespace star {

std::string_view to_string(Units u) {
  switch (u) {
    case Units::dB: return "dB";
    case Units::linear: return "linear";
    case Units::degrees: return "degrees";
    case Units::meters: return "meters";
    case Units::dimensionless: return "dimensionless";
  }
  return "dimensionless";
}

Units parse_units(std::string_view s) {
  if (s == "dB") return Units::dB;
  if (s == "linear") return Units::linear;
  if (s == "degrees") return Units::degrees;
  if (s == "meters") return Units::meters;
  if (s == "dimensionless") return Units::dimensionless;
  fail(ErrorKind::parameter, "unknown units '" + std::string(s) + "'");
}

std::string_view to_string(OrbitPass p) { return p == OrbitPass::ASC ? "ASC" : "DESC"; }
std::string_view to_string(Polarization p) { return p == Polarization::VV ? "VV" : "VH"; }

OrbitPass parse_orbit_pass(std::string_view s) {
  if (s == "ASC" || s == "ASCENDING") return OrbitPass::ASC;
  if (s == "DESC" || s == "DESCENDING") return OrbitPass::DESC;
  fail(ErrorKind::parameter, "unknown orbit pass '" + std::string(s) + "'");
}

Polarization parse_polarization(std::string_view s) {
  if (s == "VV") return Polarization::VV;
  if (s == "VH") return Polarization::VH;
  fail(ErrorKind::parameter, "unknown polarization '" + std::string(s) + "'");
}

void validate(const GridSpec& spec) {
  require(spec.width > 0 && spec.height > 0, ErrorKind::parameter, "grid dimensions must be positive");
  require(spec.transform.pixel_w > 0.0, ErrorKind::parameter, "pixel width must be positive");
  require(spec.transform.pixel_h != 0.0, ErrorKind::parameter, "pixel height must be non-zero");
}

bool co_registered(const GridSpec& a, const GridSpec& b) {
  if (a.width != b.width || a.height != b.height || a.crs_id != b.crs_id) return false;
  const auto close = [](double u, double v, double scale) { return std::abs(u - v) <= 1e-9 * std::abs(scale); };
  const auto& ta = a.transform;
  const auto& tb = b.transform;
  return close(ta.pixel_w, tb.pixel_w, ta.pixel_w) && close(ta.pixel_h, tb.pixel_h, ta.pixel_h) &&
         close(ta.origin_x, tb.origin_x, ta.pixel_w) && close(ta.origin_y, tb.origin_y, ta.pixel_h);
}

void require_co_registered(const GridSpec& a, const GridSpec& b, std::string_view what) {
  if (!co_registered(a, b)) {
    fail(ErrorKind::alignment, std::string(what) + ": grids are not co-registered (" + std::to_string(a.width) + "x" +
                                   std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                                   std::to_string(b.height) + ")");
  }
}

RasterGrid::RasterGrid(GridSpec spec, Units units, double fill)
    : spec_(std::move(spec)), units_(units), values_(spec_.size(), fill), valid_(spec_.size(), 1) {
  validate(spec_);
}

RasterGrid::RasterGrid(GridSpec spec, Units units, std::vector<double> values)
    : spec_(std::move(spec)), units_(units), values_(std::move(values)), valid_(values_.size(), 1) {
  validate(spec_);
  require(values_.size() == spec_.size(), ErrorKind::parameter, "value count does not match grid dimensions");
}

RasterGrid::RasterGrid(GridSpec spec, Units units, std::vector<double> values, std::vector<std::uint8_t> valid)
    : spec_(std::move(spec)), units_(units), values_(std::move(values)), valid_(std::move(valid)) {
  validate(spec_);
  require(values_.size() == spec_.size() && valid_.size() == spec_.size(), ErrorKind::parameter,
          "value/mask count does not match grid dimensions");
}

std::size_t RasterGrid::valid_count() const {
  return static_cast<std::size_t>(std::count_if(valid_.begin(), valid_.end(), [](auto v) { return v != 0; }));
}

void RasterGrid::check_invariants() const {
  validate(spec_);
  require(values_.size() == spec_.size() && valid_.size() == spec_.size(), ErrorKind::parameter,
          "value/mask count does not match grid dimensions");
  if (units_ == Units::linear) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      require(!valid_[i] || values_[i] > 0.0, ErrorKind::unit, "linear grid holds a non-positive valid value");
    }
  }
}

BinaryMask::BinaryMask(GridSpec spec) : spec_(std::move(spec)), bits_(spec_.size(), 0), valid_(spec_.size(), 1) {
  validate(spec_);
}

BinaryMask::BinaryMask(GridSpec spec, std::vector<std::uint8_t> bits)
    : spec_(std::move(spec)), bits_(std::move(bits)), valid_(bits_.size(), 1) {
  validate(spec_);
  require(bits_.size() == spec_.size(), ErrorKind::parameter, "mask length does not match grid dimensions");
  for (auto& b : bits_) b = b ? 1 : 0;
}

BinaryMask::BinaryMask(GridSpec spec, std::vector<std::uint8_t> bits, std::vector<std::uint8_t> valid)
    : spec_(std::move(spec)), bits_(std::move(bits)), valid_(std::move(valid)) {
  validate(spec_);
  require(bits_.size() == spec_.size() && valid_.size() == spec_.size(), ErrorKind::parameter,
          "mask length does not match grid dimensions");
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryMask::count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) n += (bits_[i] && valid_[i]) ? 1 : 0;
  return n;
}

RasterGrid BinaryMask::to_grid() const {
  std::vector<double> v(bits_.begin(), bits_.end());
  return RasterGrid(spec_, Units::dimensionless, std::move(v), valid_);
}

BinaryMask BinaryMask::from_grid(const RasterGrid& grid) {
  std::vector<std::uint8_t> bits(grid.size(), 0);
  std::vector<std::uint8_t> valid(grid.valid_mask().begin(), grid.valid_mask().end());
  const auto vals = grid.values();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (!valid[i]) continue;
    require(vals[i] == 0.0 || vals[i] == 1.0, ErrorKind::parameter, "mask values must be 0 or 1");
    bits[i] = vals[i] == 1.0 ? 1 : 0;
  }
  return BinaryMask(grid.spec(), std::move(bits), std::move(valid));
}

Kernel::Kernel(int radius, KernelShape shape, std::vector<double> weights, bool normalize)
    : radius_(radius), shape_(shape), weights_(std::move(weights)), normalized_(normalize) {
  require(radius_ >= 0, ErrorKind::parameter, "kernel radius must be non-negative");
  const auto n = static_cast<std::size_t>(size()) * static_cast<std::size_t>(size());
  require(weights_.size() == n, ErrorKind::parameter, "kernel weight count must be (2r+1)^2");
  if (normalize) {
    const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    require(total != 0.0, ErrorKind::parameter, "cannot normalize a kernel whose weights sum to zero");
    for (auto& w : weights_) w /= total;
  }
}

Kernel Kernel::square(int radius, bool normalize) {
  require(radius >= 0, ErrorKind::parameter, "kernel radius must be non-negative");
  const auto side = static_cast<std::size_t>(2 * radius + 1);
  return Kernel(radius, KernelShape::square, std::vector<double>(side * side, 1.0), normalize);
}

Kernel Kernel::circle(int radius, bool normalize) {
  require(radius >= 0, ErrorKind::parameter, "kernel radius must be non-negative");
  const int side = 2 * radius + 1;
  std::vector<double> w(static_cast<std::size_t>(side * side), 0.0);
  const double r2 = static_cast<double>(radius) * radius;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (static_cast<double>(dx * dx + dy * dy) <= r2) w[static_cast<std::size_t>((dy + radius) * side + dx + radius)] = 1.0;
    }
  }
  return Kernel(radius, KernelShape::circle, std::move(w), normalize);
}

Kernel Kernel::identity() { return Kernel(0, KernelShape::square, {1.0}, true); }

Kernel Kernel::custom(int radius, std::vector<double> weights, bool normalize) {
  return Kernel(radius, KernelShape::square, std::move(weights), normalize);
}

double Kernel::sum() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

TimeStack::TimeStack(std::vector<StackLayer> layers) : layers_(std::move(layers)) {
  for (std::size_t i = 1; i < layers_.size(); ++i) {
    require_co_registered(layers_[0].grid.spec(), layers_[i].grid.spec(), "time stack");
    require(layers_[i].grid.units() == layers_[0].grid.units(), ErrorKind::unit, "time stack layers must share units");
    require(layers_[i - 1].timestamp <= layers_[i].timestamp, ErrorKind::parameter,
            "time stack timestamps must be non-decreasing");
  }
}

const GridSpec& TimeStack::spec() const {
  require(!layers_.empty(), ErrorKind::parameter, "empty time stack");
  return layers_.front().grid.spec();
}

Units TimeStack::units() const {
  require(!layers_.empty(), ErrorKind::parameter, "empty time stack");
  return layers_.front().grid.units();
}

}  // namespace star
