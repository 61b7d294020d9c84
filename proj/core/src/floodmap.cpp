#include "star/floodmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "star/error.hpp"

namespace star::flood {

Histogram::Histogram(std::vector<double> edges, std::vector<std::uint64_t> counts)
    : edges_(std::move(edges)), counts_(std::move(counts)) {
  require(edges_.size() >= 2 && counts_.size() + 1 == edges_.size(), ErrorKind::parameter,
          "histogram needs B+1 edges for B counts");
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    require(edges_[i] > edges_[i - 1], ErrorKind::parameter, "histogram edges must be strictly increasing");
  }
  const double w0 = edges_[1] - edges_[0];
  uniform_ = true;
  for (std::size_t i = 1; i < counts_.size() && uniform_; ++i) {
    uniform_ = std::abs((edges_[i + 1] - edges_[i]) - w0) <= 1e-9 * std::abs(w0);
  }
}

Histogram Histogram::uniform(double lo, double hi, int bins) {
  require(bins >= 2, ErrorKind::parameter, "histogram needs at least two bins");
  require(hi > lo, ErrorKind::parameter, "histogram range must satisfy lo < hi");
  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / bins;
  return Histogram(std::move(edges), std::vector<std::uint64_t>(static_cast<std::size_t>(bins), 0));
}

void Histogram::add(double value) {
  if (!(value >= edges_.front() && value <= edges_.back())) return;
  std::size_t bin;
  if (uniform_) {
    const double w = (edges_.back() - edges_.front()) / static_cast<double>(counts_.size());
    bin = static_cast<std::size_t>((value - edges_.front()) / w);
    bin = std::min(bin, counts_.size() - 1);
    // Guard against rounding across an edge.
    if (bin > 0 && value < edges_[bin]) --bin;
    if (bin + 1 < counts_.size() && value >= edges_[bin + 1]) ++bin;
  } else {
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), value);
    bin = std::min(static_cast<std::size_t>(it - edges_.begin()) - 1, counts_.size() - 1);
  }
  ++counts_[bin];
}

void Histogram::add(const RasterGrid& grid) { add(grid, 0, 0, grid.width(), grid.height()); }

void Histogram::add(const RasterGrid& grid, int x0, int y0, int x1, int y1) {
  for (int y = std::max(0, y0); y < std::min(grid.height(), y1); ++y) {
    for (int x = std::max(0, x0); x < std::min(grid.width(), x1); ++x) {
      if (grid.valid(x, y)) add(grid.at(x, y));
    }
  }
}

void Histogram::merge(const Histogram& other) {
  require(other.edges_ == edges_, ErrorKind::parameter, "cannot merge histograms with different edges");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

std::uint64_t Histogram::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }

int Histogram::nonempty_bins() const {
  return static_cast<int>(std::count_if(counts_.begin(), counts_.end(), [](auto c) { return c > 0; }));
}

OtsuResult otsu(const Histogram& hist) {
  require(hist.nonempty_bins() >= 2, ErrorKind::degenerate_histogram,
          "histogram has all its mass in fewer than two bins");
  const auto& n = hist.counts();
  const auto& edges = hist.edges();
  const std::size_t bins = n.size();
  const std::uint64_t total = hist.total();
  const double n_total = static_cast<double>(total);

  OtsuResult best;
  best.between_class_variance = -1.0;

  if (hist.uniform_bins()) {
    // Class means in bin-index units from exact integer sums; scale by the bin width.
    const double width = (edges.back() - edges.front()) / static_cast<double>(bins);
    std::uint64_t s_total = 0;
    for (std::size_t i = 0; i < bins; ++i) s_total += n[i] * i;
    const double mu = static_cast<double>(s_total) / n_total;
    double ss = 0.0;
    for (std::size_t i = 0; i < bins; ++i) {
      const double d = static_cast<double>(i) - mu;
      ss += static_cast<double>(n[i]) * d * d;
    }
    best.total_variance = ss / n_total * width * width;

    std::uint64_t n0 = 0;
    std::uint64_t s0 = 0;
    for (std::size_t t = 1; t < bins; ++t) {
      n0 += n[t - 1];
      s0 += n[t - 1] * (t - 1);
      const std::uint64_t n1 = total - n0;
      double sb = 0.0;
      if (n0 > 0 && n1 > 0) {
        const double w0 = static_cast<double>(n0) / n_total;
        const double w1 = static_cast<double>(n1) / n_total;
        const double diff = (static_cast<double>(s0) / static_cast<double>(n0) -
                             static_cast<double>(s_total - s0) / static_cast<double>(n1)) *
                            width;
        sb = w0 * w1 * diff * diff;
      }
      if (sb > best.between_class_variance) {
        best.between_class_variance = sb;
        best.cut = static_cast<int>(t);
        best.below = n0;
        best.above = n1;
      }
    }
  } else {
    std::vector<double> centre(bins);
    for (std::size_t i = 0; i < bins; ++i) centre[i] = 0.5 * (edges[i] + edges[i + 1]);
    double s_total = 0.0;
    for (std::size_t i = 0; i < bins; ++i) s_total += static_cast<double>(n[i]) * centre[i];
    const double mu = s_total / n_total;
    double ss = 0.0;
    for (std::size_t i = 0; i < bins; ++i) ss += static_cast<double>(n[i]) * (centre[i] - mu) * (centre[i] - mu);
    best.total_variance = ss / n_total;

    std::uint64_t n0 = 0;
    double s0 = 0.0;
    for (std::size_t t = 1; t < bins; ++t) {
      n0 += n[t - 1];
      s0 += static_cast<double>(n[t - 1]) * centre[t - 1];
      const std::uint64_t n1 = total - n0;
      double sb = 0.0;
      if (n0 > 0 && n1 > 0) {
        const double w0 = static_cast<double>(n0) / n_total;
        const double w1 = static_cast<double>(n1) / n_total;
        const double diff = s0 / static_cast<double>(n0) - (s_total - s0) / static_cast<double>(n1);
        sb = w0 * w1 * diff * diff;
      }
      if (sb > best.between_class_variance) {
        best.between_class_variance = sb;
        best.cut = static_cast<int>(t);
        best.below = n0;
        best.above = n1;
      }
    }
  }

  best.threshold = edges[static_cast<std::size_t>(best.cut)];
  best.bimodality =
      best.total_variance > 0.0 ? std::clamp(best.between_class_variance / best.total_variance, 0.0, 1.0) : 0.0;
  return best;
}

void ChessboardParams::validate() const {
  require(cell_px >= 16, ErrorKind::parameter, "chessboard cell size must be >= 16 pixels");
  require(bimodality_min > 0.0 && bimodality_min < 1.0, ErrorKind::parameter, "bimodality_min must lie in (0,1)");
  require(bins >= 2, ErrorKind::parameter, "chessboard histograms need at least two bins");
  require(hi_db > lo_db, ErrorKind::parameter, "chessboard histogram range must satisfy lo < hi");
  require(class_floor >= 0.0 && class_floor < 0.5, ErrorKind::parameter, "class floor must lie in [0, 0.5)");
}

ChessboardResult chessboard_otsu(const RasterGrid& grid, const ChessboardParams& params) {
  params.validate();
  require(grid.units() == Units::dB, ErrorKind::unit, "chessboard_otsu requires dB input");
  const int cells_x = (grid.width() + params.cell_px - 1) / params.cell_px;
  const int cells_y = (grid.height() + params.cell_px - 1) / params.cell_px;

  ChessboardResult out;
  out.cells_total = cells_x * cells_y;
  Histogram aggregate = Histogram::uniform(params.lo_db, params.hi_db, params.bins);
  for (int cy = 0; cy < cells_y; ++cy) {
    for (int cx = 0; cx < cells_x; ++cx) {
      Histogram cell = Histogram::uniform(params.lo_db, params.hi_db, params.bins);
      const int x0 = cx * params.cell_px;
      const int y0 = cy * params.cell_px;
      cell.add(grid, x0, y0, x0 + params.cell_px, y0 + params.cell_px);
      if (cell.nonempty_bins() < 2) continue;
      const OtsuResult r = otsu(cell);
      const double floor = params.class_floor * static_cast<double>(cell.total());
      if (r.bimodality < params.bimodality_min) continue;
      if (static_cast<double>(r.below) < floor || static_cast<double>(r.above) < floor) continue;
      aggregate.merge(cell);
      out.selected.push_back(cy * cells_x + cx);
    }
  }
  out.cells_selected = static_cast<int>(out.selected.size());
  require(out.cells_selected > 0, ErrorKind::no_bimodal_region,
          "no chessboard cell passed the bimodality test (" + std::to_string(out.cells_total) + " cells)");
  out.otsu = otsu(aggregate);
  return out;
}

BinaryMask water_mask(const RasterGrid& grid, double threshold_db, const BinaryMask* steep, int min_pixels,
                      objects::Connectivity conn) {
  require(grid.units() == Units::dB, ErrorKind::unit, "water_mask requires dB input");
  if (steep != nullptr) require_co_registered(grid.spec(), steep->spec(), "water_mask");
  std::vector<std::uint8_t> bits(grid.size(), 0);
  std::vector<std::uint8_t> valid(grid.valid_mask().begin(), grid.valid_mask().end());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (!valid[i]) continue;
    bits[i] = grid.values()[i] < threshold_db ? 1 : 0;
    if (steep != nullptr && steep->bits()[i] && steep->valid_mask()[i]) bits[i] = 0;
  }
  return objects::filter_min_size(BinaryMask(grid.spec(), std::move(bits), std::move(valid)), conn, min_pixels);
}

FloodExtent flood_extent(const BinaryMask& pre, const BinaryMask& during, double pixel_area_m2,
                         std::string date_pre, std::string date_during) {
  require_co_registered(pre.spec(), during.spec(), "flood_extent");
  require(pixel_area_m2 > 0.0, ErrorKind::parameter, "pixel area must be positive");
  FloodExtent out{{}, BinaryMask(during.spec())};
  auto& r = out.report;
  r.date_pre = std::move(date_pre);
  r.date_during = std::move(date_during);
  r.pixel_area_m2 = pixel_area_m2;
  for (std::size_t i = 0; i < pre.size(); ++i) {
    const bool permanent = pre.bits()[i] && pre.valid_mask()[i];
    const bool wet = during.bits()[i] && during.valid_mask()[i];
    r.permanent_water_px += permanent ? 1 : 0;
    r.during_water_px += wet ? 1 : 0;
    const bool flooded = wet && !permanent;
    r.flood_px += flooded ? 1 : 0;
    out.flood.bits()[i] = flooded ? 1 : 0;
    out.flood.valid_mask()[i] = during.valid_mask()[i];
  }
  const auto km2 = [&](std::uint64_t px) { return static_cast<double>(px) * pixel_area_m2 / 1e6; };
  r.permanent_km2 = km2(r.permanent_water_px);
  r.during_km2 = km2(r.during_water_px);
  r.flood_km2 = km2(r.flood_px);
  return out;
}

std::string report_csv_header() {
  return "date_pre,date_during,px_permanent,px_during,px_flood,km2_permanent,km2_during,km2_flood";
}

std::string report_csv_row(const FloodReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, ",%llu,%llu,%llu,%.6f,%.6f,%.6f", static_cast<unsigned long long>(r.permanent_water_px),
                static_cast<unsigned long long>(r.during_water_px), static_cast<unsigned long long>(r.flood_px),
                r.permanent_km2, r.during_km2, r.flood_km2);
  return r.date_pre + "," + r.date_during + buf;
}

}  // namespace star::flood
