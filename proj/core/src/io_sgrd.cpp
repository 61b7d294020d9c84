#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "star/error.hpp"
#include "star/io.hpp"
#include "star/objects.hpp"

namespace star::io {

namespace {

constexpr std::size_t kHeaderSize = 44;

template <typename T>
void put_le(std::vector<unsigned char>& buf, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  buf.insert(buf.end(), raw, raw + sizeof(T));
}

template <typename T>
T get_le(const unsigned char* p) {
  unsigned char raw[sizeof(T)];
  std::memcpy(raw, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  T v;
  std::memcpy(&v, raw, sizeof(T));
  return v;
}

}  // namespace

void write_sgrd(const std::filesystem::path& path, const RasterGrid& grid) {
  std::vector<unsigned char> buf;
  buf.reserve(kHeaderSize + grid.size() * 4);
  for (const char c : {'S', 'G', 'R', 'D'}) buf.push_back(static_cast<unsigned char>(c));
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(grid.width()));
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(grid.height()));
  const auto& t = grid.spec().transform;
  for (double v : {t.origin_x, t.origin_y, t.pixel_w, t.pixel_h}) put_le<double>(buf, v);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    put_le<float>(buf, static_cast<float>(grid.valid_at(i) ? grid.values()[i] : kNodata));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  require(static_cast<bool>(out), ErrorKind::io, "short write to " + path.string());
}

RasterGrid read_sgrd(const std::filesystem::path& path, Units units, std::string crs_id) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  require(buf.size() >= kHeaderSize && std::memcmp(buf.data(), "SGRD", 4) == 0, ErrorKind::io,
          path.string() + " is not an SGRD raster");
  GridSpec spec;
  spec.width = static_cast<int>(get_le<std::uint32_t>(buf.data() + 4));
  spec.height = static_cast<int>(get_le<std::uint32_t>(buf.data() + 8));
  spec.transform.origin_x = get_le<double>(buf.data() + 12);
  spec.transform.origin_y = get_le<double>(buf.data() + 20);
  spec.transform.pixel_w = get_le<double>(buf.data() + 28);
  spec.transform.pixel_h = get_le<double>(buf.data() + 36);
  spec.crs_id = std::move(crs_id);
  require(buf.size() == kHeaderSize + spec.size() * 4, ErrorKind::io,
          path.string() + ": payload size does not match " + std::to_string(spec.width) + "x" +
              std::to_string(spec.height));
  std::vector<double> values(spec.size());
  std::vector<std::uint8_t> valid(spec.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float f = get_le<float>(buf.data() + kHeaderSize + 4 * i);
    if (std::isnan(f) || f == static_cast<float>(kNodata)) {
      valid[i] = 0;
      values[i] = 0.0;
    } else {
      values[i] = f;
    }
  }
  return RasterGrid(std::move(spec), units, std::move(values), std::move(valid));
}

RasterGrid read_raster(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".sgrd") return read_sgrd(path);
  if (ext == ".tif" || ext == ".tiff") return read_geotiff(path);
  fail(ErrorKind::io, "unsupported raster extension '" + ext + "' (expected .tif or .sgrd)");
}

void write_raster(const std::filesystem::path& path, const RasterGrid& grid) {
  const auto ext = path.extension().string();
  if (ext == ".sgrd") return write_sgrd(path, grid);
  if (ext == ".tif" || ext == ".tiff") return write_geotiff(path, grid);
  fail(ErrorKind::io, "unsupported raster extension '" + ext + "' (expected .tif or .sgrd)");
}

BinaryMask read_mask(const std::filesystem::path& path) { return BinaryMask::from_grid(read_raster(path)); }

}  // namespace star::io
