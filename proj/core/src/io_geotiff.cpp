#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "star/error.hpp"
#include "star/focal.hpp"
#include "star/io.hpp"

namespace star::io {

namespace {

enum TiffType : std::uint16_t {
  kByte = 1,
  kAscii = 2,
  kShort = 3,
  kLong = 4,
  kRational = 5,
  kSByte = 6,
  kUndefined = 7,
  kSShort = 8,
  kSLong = 9,
  kSRational = 10,
  kFloat = 11,
  kDouble = 12,
};

std::size_t type_size(std::uint16_t type) {
  switch (type) {
    case kByte:
    case kAscii:
    case kSByte:
    case kUndefined:
      return 1;
    case kShort:
    case kSShort:
      return 2;
    case kLong:
    case kSLong:
    case kFloat:
      return 4;
    case kRational:
    case kSRational:
    case kDouble:
      return 8;
    default:
      return 0;
  }
}

constexpr std::uint16_t kGeoKeyModelType = 1024;
constexpr std::uint16_t kGeoKeyRasterType = 1025;
constexpr std::uint16_t kGeoKeyGeographicType = 2048;
constexpr std::uint16_t kGeoKeyProjectedType = 3072;

// ---- writer ---------------------------------------------------------------

class Writer {
 public:
  struct Entry {
    std::uint16_t tag;
    std::uint16_t type;
    std::uint32_t count;
    std::vector<unsigned char> data;
  };

  template <typename T>
  static void put(std::vector<unsigned char>& buf, T value) {
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    buf.insert(buf.end(), raw, raw + sizeof(T));
  }

  void shorts(std::uint16_t tag, const std::vector<std::uint16_t>& v) {
    Entry e{tag, kShort, static_cast<std::uint32_t>(v.size()), {}};
    for (auto x : v) put(e.data, x);
    entries_.push_back(std::move(e));
  }
  void longs(std::uint16_t tag, const std::vector<std::uint32_t>& v) {
    Entry e{tag, kLong, static_cast<std::uint32_t>(v.size()), {}};
    for (auto x : v) put(e.data, x);
    entries_.push_back(std::move(e));
  }
  void doubles(std::uint16_t tag, const std::vector<double>& v) {
    Entry e{tag, kDouble, static_cast<std::uint32_t>(v.size()), {}};
    for (auto x : v) put(e.data, x);
    entries_.push_back(std::move(e));
  }
  void ascii(std::uint16_t tag, const std::string& s) {
    Entry e{tag, kAscii, static_cast<std::uint32_t>(s.size() + 1), {}};
    e.data.assign(s.begin(), s.end());
    e.data.push_back(0);
    entries_.push_back(std::move(e));
  }

  // Lays out header, IFD, out-of-line tag data, then the single image strip.
  std::vector<unsigned char> finish(const std::vector<unsigned char>& pixels) {
    longs(273, {0});  // StripOffsets, patched below
    longs(279, {static_cast<std::uint32_t>(pixels.size())});
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.tag < b.tag; });

    const std::size_t ifd_size = 2 + 12 * entries_.size() + 4;
    std::size_t extra = 8 + ifd_size;
    std::vector<std::size_t> offsets(entries_.size(), 0);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].data.size() > 4) {
        extra += extra & 1u;  // word alignment
        offsets[i] = extra;
        extra += entries_[i].data.size();
      }
    }
    extra += extra & 1u;
    const std::size_t strip_offset = extra;
    require(strip_offset + pixels.size() <= 0xFFFFFFFFu, ErrorKind::io, "raster too large for classic TIFF");
    for (auto& e : entries_) {
      if (e.tag == 273) {
        e.data.clear();
        put(e.data, static_cast<std::uint32_t>(strip_offset));
      }
    }

    std::vector<unsigned char> out;
    out.reserve(strip_offset + pixels.size());
    out.push_back('I');
    out.push_back('I');
    put<std::uint16_t>(out, 42);
    put<std::uint32_t>(out, 8);
    put<std::uint16_t>(out, static_cast<std::uint16_t>(entries_.size()));
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      put(out, e.tag);
      put(out, e.type);
      put(out, e.count);
      if (e.data.size() > 4) {
        put(out, static_cast<std::uint32_t>(offsets[i]));
      } else {
        auto inline_data = e.data;
        inline_data.resize(4, 0);
        out.insert(out.end(), inline_data.begin(), inline_data.end());
      }
    }
    put<std::uint32_t>(out, 0);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (offsets[i] == 0) continue;
      out.resize(offsets[i], 0);
      out.insert(out.end(), entries_[i].data.begin(), entries_[i].data.end());
    }
    out.resize(strip_offset, 0);
    out.insert(out.end(), pixels.begin(), pixels.end());
    return out;
  }

 private:
  std::vector<Entry> entries_;
};

std::optional<std::uint32_t> epsg_code(const std::string& crs) {
  if (crs.rfind("EPSG:", 0) != 0) return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long code = std::stoul(crs.substr(5), &used);
    if (used != crs.size() - 5 || code == 0 || code > 0xFFFF) return std::nullopt;
    return static_cast<std::uint32_t>(code);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void add_georeferencing(Writer& w, const GridSpec& spec) {
  const auto& t = spec.transform;
  w.doubles(33550, {t.pixel_w, -t.pixel_h, 0.0});
  w.doubles(33922, {0.0, 0.0, 0.0, t.origin_x, t.origin_y, 0.0});
  std::vector<std::uint16_t> keys{1, 1, 0, 0};
  const auto key = [&](std::uint16_t id, std::uint16_t value) {
    keys.insert(keys.end(), {id, 0, 1, value});
    ++keys[3];
  };
  const auto code = epsg_code(spec.crs_id);
  if (code) {
    const bool geographic = is_geographic_crs(spec.crs_id);
    key(kGeoKeyModelType, geographic ? 2 : 1);
    key(kGeoKeyRasterType, 1);
    key(geographic ? kGeoKeyGeographicType : kGeoKeyProjectedType, static_cast<std::uint16_t>(*code));
  } else {
    key(kGeoKeyRasterType, 1);
  }
  w.shorts(34735, keys);
}

void write_file(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorKind::io, "short write to " + path.string());
}

void common_tags(Writer& w, const GridSpec& spec, std::uint16_t bits, std::uint16_t sample_format) {
  w.longs(256, {static_cast<std::uint32_t>(spec.width)});
  w.longs(257, {static_cast<std::uint32_t>(spec.height)});
  w.shorts(258, {bits});
  w.shorts(259, {1});
  w.shorts(262, {1});
  w.shorts(277, {1});
  w.longs(278, {static_cast<std::uint32_t>(spec.height)});
  w.shorts(284, {1});
  w.shorts(339, {sample_format});
  add_georeferencing(w, spec);
}

// ---- reader ---------------------------------------------------------------

class Reader {
 public:
  Reader(std::vector<unsigned char> bytes, std::string name) : buf_(std::move(bytes)), name_(std::move(name)) {
    check(buf_.size() >= 8, "file too short");
    if (buf_[0] == 'I' && buf_[1] == 'I') {
      big_ = false;
    } else if (buf_[0] == 'M' && buf_[1] == 'M') {
      big_ = true;
    } else {
      bad("missing byte-order mark");
    }
    const auto magic = u16(2);
    check(magic != 43, "BigTIFF is not supported");
    check(magic == 42, "bad TIFF magic");
  }

  std::uint16_t u16(std::size_t off) const { return read<std::uint16_t>(off); }
  std::uint32_t u32(std::size_t off) const { return read<std::uint32_t>(off); }

  template <typename T>
  T read(std::size_t off) const {
    check(off + sizeof(T) <= buf_.size(), "offset out of range");
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, buf_.data() + off, sizeof(T));
    if (big_ != (std::endian::native == std::endian::big)) std::reverse(raw, raw + sizeof(T));
    T v;
    std::memcpy(&v, raw, sizeof(T));
    return v;
  }

  struct Tag {
    std::uint16_t type = 0;
    std::uint32_t count = 0;
    std::size_t offset = 0;  // where the value bytes live
  };

  std::map<std::uint16_t, Tag> first_ifd() const {
    const std::size_t ifd = u32(4);
    const std::uint16_t n = u16(ifd);
    std::map<std::uint16_t, Tag> tags;
    for (std::uint16_t i = 0; i < n; ++i) {
      const std::size_t e = ifd + 2 + 12u * i;
      Tag t{u16(e + 2), u32(e + 4), 0};
      const std::size_t bytes = type_size(t.type) * t.count;
      t.offset = bytes <= 4 ? e + 8 : u32(e + 8);
      if (type_size(t.type) == 0) continue;  // unknown type: skip per baseline rules
      check(t.offset + bytes <= buf_.size(), "tag data out of range");
      tags.emplace(u16(e), t);
    }
    return tags;
  }

  double number(const Tag& t, std::uint32_t i) const {
    const std::size_t off = t.offset + type_size(t.type) * i;
    switch (t.type) {
      case kByte:
      case kUndefined:
        return buf_[off];
      case kSByte:
        return static_cast<std::int8_t>(buf_[off]);
      case kShort:
        return u16(off);
      case kSShort:
        return read<std::int16_t>(off);
      case kLong:
        return u32(off);
      case kSLong:
        return read<std::int32_t>(off);
      case kRational:
        return static_cast<double>(u32(off)) / static_cast<double>(u32(off + 4));
      case kSRational:
        return static_cast<double>(read<std::int32_t>(off)) / static_cast<double>(read<std::int32_t>(off + 4));
      case kFloat:
        return read<float>(off);
      case kDouble:
        return read<double>(off);
      default:
        bad("unsupported tag type");
    }
  }

  std::vector<double> numbers(const Tag& t) const {
    std::vector<double> v(t.count);
    for (std::uint32_t i = 0; i < t.count; ++i) v[i] = number(t, i);
    return v;
  }

  std::string text(const Tag& t) const {
    std::string s(reinterpret_cast<const char*>(buf_.data() + t.offset), t.count);
    while (!s.empty() && s.back() == '\0') s.pop_back();
    return s;
  }

  const unsigned char* data() const { return buf_.data(); }
  std::size_t size() const { return buf_.size(); }
  bool big_endian() const { return big_; }

  void check(bool ok, const std::string& what) const {
    if (!ok) bad(what);
  }
  [[noreturn]] void bad(const std::string& what) const { fail(ErrorKind::io, name_ + ": " + what); }

 private:
  std::vector<unsigned char> buf_;
  std::string name_;
  bool big_ = false;
};

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

void write_geotiff(const std::filesystem::path& path, const RasterGrid& grid) {
  Writer w;
  common_tags(w, grid.spec(), 32, 3);
  w.ascii(270, "star:units=" + std::string(to_string(grid.units())));
  w.ascii(42113, "-9999");
  std::vector<unsigned char> pixels;
  pixels.reserve(grid.size() * 4);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Writer::put(pixels, static_cast<float>(grid.valid_at(i) ? grid.values()[i] : kNodata));
  }
  write_file(path, w.finish(pixels));
}

void write_mask_geotiff(const std::filesystem::path& path, const BinaryMask& mask) {
  Writer w;
  common_tags(w, mask.spec(), 8, 1);
  w.ascii(270, "star:units=dimensionless");
  w.ascii(42113, std::to_string(kMaskNodata));
  std::vector<unsigned char> pixels(mask.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = mask.valid_mask()[i] ? (mask.bits()[i] ? 1 : 0) : kMaskNodata;
  }
  write_file(path, w.finish(pixels));
}

RasterGrid read_geotiff(const std::filesystem::path& path) {
  const Reader r(slurp(path), path.string());
  const auto tags = r.first_ifd();
  const auto get = [&](std::uint16_t tag) -> const Reader::Tag* {
    const auto it = tags.find(tag);
    return it == tags.end() ? nullptr : &it->second;
  };
  const auto scalar = [&](std::uint16_t tag, double fallback) {
    const auto* t = get(tag);
    return t != nullptr && t->count > 0 ? r.number(*t, 0) : fallback;
  };

  r.check(get(256) != nullptr && get(257) != nullptr, "missing image dimensions");
  r.check(get(322) == nullptr, "tiled TIFFs are not supported");
  r.check(scalar(259, 1) == 1, "compressed TIFFs are not supported");
  r.check(scalar(277, 1) == 1, "only single-band TIFFs are supported");

  GridSpec spec;
  spec.width = static_cast<int>(scalar(256, 0));
  spec.height = static_cast<int>(scalar(257, 0));
  r.check(spec.width > 0 && spec.height > 0, "empty image");
  const int bits = static_cast<int>(scalar(258, 1));
  const int format = static_cast<int>(scalar(339, 1));
  const std::size_t bps = static_cast<std::size_t>(bits) / 8;
  r.check(bits % 8 == 0 && bps >= 1 && bps <= 8, "unsupported bit depth " + std::to_string(bits));
  r.check((format == 3 && (bits == 32 || bits == 64)) || ((format == 1 || format == 2) && bits <= 32),
          "unsupported sample format");

  // Georeferencing: scale + tiepoint, or an axis-aligned transformation matrix.
  if (const auto* scale = get(33550); scale != nullptr && get(33922) != nullptr) {
    const auto s = r.numbers(*scale);
    const auto tp = r.numbers(*get(33922));
    r.check(s.size() >= 2 && tp.size() >= 6, "malformed georeferencing tags");
    spec.transform.pixel_w = s[0];
    spec.transform.pixel_h = -s[1];
    spec.transform.origin_x = tp[3] - tp[0] * s[0];
    spec.transform.origin_y = tp[4] + tp[1] * s[1];
  } else if (const auto* m = get(34264); m != nullptr) {
    const auto v = r.numbers(*m);
    r.check(v.size() >= 16 && v[1] == 0.0 && v[4] == 0.0, "rotated model transformations are not supported");
    spec.transform = {v[3], v[7], v[0], v[5]};
  } else {
    r.bad("missing georeferencing (ModelPixelScale/ModelTiepoint)");
  }

  if (const auto* gk = get(34735); gk != nullptr) {
    const auto keys = r.numbers(*gk);
    const std::size_t n = keys.size() >= 4 ? static_cast<std::size_t>(keys[3]) : 0;
    for (std::size_t k = 0; k < n && 4 * k + 7 < keys.size(); ++k) {
      const auto id = static_cast<std::uint16_t>(keys[4 + 4 * k]);
      const auto location = keys[5 + 4 * k];
      const auto value = keys[7 + 4 * k];
      if (location != 0) continue;
      if ((id == kGeoKeyProjectedType || id == kGeoKeyGeographicType) && value > 0 && value < 32767) {
        spec.crs_id = "EPSG:" + std::to_string(static_cast<int>(value));
      } else if (id == kGeoKeyRasterType && value == 2) {
        // PixelIsPoint: tiepoint refers to the pixel centre.
        spec.transform.origin_x -= 0.5 * spec.transform.pixel_w;
        spec.transform.origin_y -= 0.5 * spec.transform.pixel_h;
      }
    }
  }
  validate(spec);

  Units units = Units::dimensionless;
  if (const auto* d = get(270); d != nullptr && d->type == kAscii) {
    const std::string desc = r.text(*d);
    const auto pos = desc.find("star:units=");
    if (pos != std::string::npos) {
      auto token = desc.substr(pos + 11);
      token = token.substr(0, token.find_first_of(" ;\n"));
      units = parse_units(token);
    }
  }
  std::optional<double> nodata;
  if (const auto* nd = get(42113); nd != nullptr && nd->type == kAscii) {
    try {
      nodata = std::stod(r.text(*nd));
    } catch (const std::exception&) {
    }
  }

  const auto* offsets_tag = get(273);
  const auto* counts_tag = get(279);
  r.check(offsets_tag != nullptr, "missing StripOffsets");
  const auto offsets = r.numbers(*offsets_tag);
  const int rows_per_strip = static_cast<int>(std::min<double>(scalar(278, spec.height), spec.height));
  r.check(rows_per_strip > 0, "bad RowsPerStrip");
  const std::size_t row_bytes = static_cast<std::size_t>(spec.width) * bps;
  const std::size_t strips = static_cast<std::size_t>((spec.height + rows_per_strip - 1) / rows_per_strip);
  r.check(offsets.size() >= strips, "too few strips");
  if (counts_tag != nullptr) r.check(r.numbers(*counts_tag).size() >= strips, "too few strip byte counts");

  std::vector<double> values(spec.size(), 0.0);
  std::vector<std::uint8_t> valid(spec.size(), 1);
  const bool swap = r.big_endian() != (std::endian::native == std::endian::big);
  for (int y = 0; y < spec.height; ++y) {
    const auto strip = static_cast<std::size_t>(y / rows_per_strip);
    const std::size_t row_off =
        static_cast<std::size_t>(offsets[strip]) + static_cast<std::size_t>(y % rows_per_strip) * row_bytes;
    r.check(row_off + row_bytes <= r.size(), "strip data out of range");
    for (int x = 0; x < spec.width; ++x) {
      unsigned char raw[8];
      std::memcpy(raw, r.data() + row_off + static_cast<std::size_t>(x) * bps, bps);
      if (swap) std::reverse(raw, raw + bps);
      double v = 0.0;
      if (format == 3 && bps == 4) {
        float f;
        std::memcpy(&f, raw, 4);
        v = f;
      } else if (format == 3) {
        std::memcpy(&v, raw, 8);
      } else if (format == 1) {
        std::uint32_t u = 0;
        std::memcpy(&u, raw, bps);  // little-endian host assumed after the swap above
        v = u;
      } else {
        std::int32_t s = 0;
        std::memcpy(&s, raw, bps);
        const int shift = 32 - static_cast<int>(bps) * 8;
        v = static_cast<double>(static_cast<std::int32_t>(static_cast<std::uint32_t>(s) << shift) >> shift);
      }
      const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(spec.width) +
                            static_cast<std::size_t>(x);
      const bool is_nodata = std::isnan(v) ||
                             (nodata && (v == *nodata || (format == 3 && bps == 4 &&
                                                          static_cast<float>(v) == static_cast<float>(*nodata))));
      if (is_nodata) {
        valid[i] = 0;
      } else {
        values[i] = v;
      }
    }
  }
  return RasterGrid(std::move(spec), units, std::move(values), std::move(valid));
}

}  // namespace star::io
