#pragma once

#include <cstdint>
#include <filesystem>

#include "star/raster.hpp"

namespace star::io {

/// Nodata sentinel for float rasters on disk.
inline constexpr double kNodata = -9999.0;
/// Nodata value of byte masks on disk.
inline constexpr std::uint8_t kMaskNodata = 255;

/// Raw little-endian grid: 4-byte magic "SGRD", u32 width, u32 height, f64 origin_x,
/// origin_y, pixel_w, pixel_h (44 bytes), then row-major float32 values. Invalid pixels
/// are written as kNodata.
void write_sgrd(const std::filesystem::path& path, const RasterGrid& grid);
/// The format carries neither CRS nor units; the caller supplies them.
RasterGrid read_sgrd(const std::filesystem::path& path, Units units = Units::dimensionless, std::string crs_id = {});

/// Single-band float32 GeoTIFF (uncompressed, one strip) with GDAL_NODATA = -9999, the
/// EPSG code in the GeoKey directory and the units in ImageDescription.
void write_geotiff(const std::filesystem::path& path, const RasterGrid& grid);
/// Single-band byte GeoTIFF with values {0, 1} and 255 as nodata.
void write_mask_geotiff(const std::filesystem::path& path, const BinaryMask& mask);

/// Reads uncompressed, stripped, single-band GeoTIFFs (8/16/32-bit integer or 32/64-bit
/// float samples, either byte order). Pixels equal to GDAL_NODATA or NaN are invalid.
/// Units come from a "star:units=" ImageDescription, else dimensionless.
RasterGrid read_geotiff(const std::filesystem::path& path);

/// Dispatch on extension: ".sgrd" or ".tif"/".tiff".
RasterGrid read_raster(const std::filesystem::path& path);
void write_raster(const std::filesystem::path& path, const RasterGrid& grid);

BinaryMask read_mask(const std::filesystem::path& path);

}  // namespace star::io
