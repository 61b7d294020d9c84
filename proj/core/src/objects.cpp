#include "star/objects.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "star/error.hpp"
#include "star/focal.hpp"

namespace star::objects {

std::string_view to_string(Connectivity c) { return c == Connectivity::four ? "four" : "eight"; }

Connectivity parse_connectivity(std::string_view s) {
  if (s == "four" || s == "4") return Connectivity::four;
  if (s == "eight" || s == "8") return Connectivity::eight;
  fail(ErrorKind::parameter, "unknown connectivity '" + std::string(s) + "'");
}

std::string_view to_string(SmoothMode m) { return m == SmoothMode::mean ? "mean" : "median"; }

SmoothMode parse_smooth_mode(std::string_view s) {
  if (s == "mean") return SmoothMode::mean;
  if (s == "median") return SmoothMode::median;
  fail(ErrorKind::parameter, "unknown smoothing mode '" + std::string(s) + "'");
}

RasterGrid smooth(const RasterGrid& grid, const Kernel& kernel, SmoothMode mode) {
  if (mode == SmoothMode::median) return focal_median(grid, kernel);
  if (kernel.normalized()) return convolve(grid, kernel);
  std::vector<double> w(kernel.weights().begin(), kernel.weights().end());
  return convolve(grid, Kernel::custom(kernel.radius(), std::move(w), true));
}

namespace {

class DisjointSet {
 public:
  int make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }
  int find(int a) {
    while (parent_[static_cast<std::size_t>(a)] != a) {
      auto& p = parent_[static_cast<std::size_t>(a)];
      p = parent_[static_cast<std::size_t>(p)];
      a = p;
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[static_cast<std::size_t>(a)] = b;
  }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<int> parent_;
};

}  // namespace

Labeling label_components(const BinaryMask& mask, Connectivity conn) {
  const int w = mask.width();
  const int h = mask.height();
  const auto fg = [&](int x, int y) {
    const auto i = mask.index(x, y);
    return mask.bits()[i] != 0 && mask.valid_mask()[i] != 0;
  };

  // First pass: provisional labels from the already-visited neighbours.
  std::vector<int> prov(mask.size(), -1);
  DisjointSet sets;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!fg(x, y)) continue;
      int label = -1;
      const auto visit = [&](int nx, int ny) {
        if (nx < 0 || ny < 0 || nx >= w || !fg(nx, ny)) return;
        const int other = prov[mask.index(nx, ny)];
        if (label < 0) {
          label = other;
        } else {
          sets.unite(label, other);
        }
      };
      visit(x - 1, y);
      visit(x, y - 1);
      if (conn == Connectivity::eight) {
        visit(x - 1, y - 1);
        visit(x + 1, y - 1);
      }
      prov[mask.index(x, y)] = label < 0 ? sets.make() : label;
    }
  }

  // Second pass: compact root ids into 1-based labels in scan order.
  Labeling out;
  out.labels.assign(mask.size(), 0);
  std::vector<int> compact(sets.size(), 0);
  for (std::size_t i = 0; i < prov.size(); ++i) {
    if (prov[i] < 0) continue;
    const int root = sets.find(prov[i]);
    auto& c = compact[static_cast<std::size_t>(root)];
    if (c == 0) {
      out.sizes.push_back(0);
      c = static_cast<int>(out.sizes.size());
    }
    out.labels[i] = c;
    ++out.sizes[static_cast<std::size_t>(c - 1)];
  }
  return out;
}

RasterGrid connected_pixel_count(const BinaryMask& mask, Connectivity conn, int max_count) {
  require(max_count > 0, ErrorKind::parameter, "max_count must be positive");
  const Labeling lab = label_components(mask, conn);
  std::vector<double> counts(mask.size(), 0.0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (lab.labels[i] == 0) continue;
    const auto size = lab.sizes[static_cast<std::size_t>(lab.labels[i] - 1)];
    counts[i] = static_cast<double>(std::min<std::size_t>(size, static_cast<std::size_t>(max_count)));
  }
  std::vector<std::uint8_t> valid(mask.valid_mask().begin(), mask.valid_mask().end());
  return RasterGrid(mask.spec(), Units::dimensionless, std::move(counts), std::move(valid));
}

BinaryMask filter_min_size(const BinaryMask& mask, Connectivity conn, int min_pixels) {
  require(min_pixels >= 1, ErrorKind::parameter, "min_pixels must be >= 1");
  if (min_pixels == 1) return mask;
  const Labeling lab = label_components(mask, conn);
  BinaryMask out = mask;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (lab.labels[i] == 0) continue;
    if (lab.sizes[static_cast<std::size_t>(lab.labels[i] - 1)] < static_cast<std::size_t>(min_pixels)) {
      out.bits()[i] = 0;
    }
  }
  return out;
}

}  // namespace star::objects
