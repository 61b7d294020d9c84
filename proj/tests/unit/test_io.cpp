#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "star/error.hpp"
#include "star/io.hpp"

namespace fs = std::filesystem;

namespace {

using namespace star;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("star_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(IoTest, GeoTiffRoundTripKeepsGeometryUnitsAndNodata) {
  auto g = oracle::random_grid(37, 21, Units::dB, -30, 10, 1, 0.1);
  const auto path = dir_ / "a.tif";
  io::write_geotiff(path, g);
  const auto back = io::read_geotiff(path);
  EXPECT_EQ(back.spec(), g.spec());
  EXPECT_EQ(back.units(), Units::dB);
  for (std::size_t i = 0; i < g.size(); ++i) {
    ASSERT_EQ(back.valid_at(i), g.valid_at(i));
    if (g.valid_at(i)) {
      EXPECT_EQ(back.values()[i], static_cast<double>(static_cast<float>(g.values()[i])));
    }
  }
}

TEST_F(IoTest, GeoTiffGeographicCrs) {
  GridSpec s{5, 4, {10.0, 50.0, 1e-3, -1e-3}, "EPSG:4326"};
  const RasterGrid g(s, Units::degrees, 35.0);
  io::write_geotiff(dir_ / "geo.tif", g);
  const auto back = io::read_geotiff(dir_ / "geo.tif");
  EXPECT_EQ(back.spec().crs_id, "EPSG:4326");
  EXPECT_EQ(back.units(), Units::degrees);
  EXPECT_DOUBLE_EQ(back.spec().transform.pixel_w, 1e-3);
}

TEST_F(IoTest, MaskRoundTrip) {
  auto m = oracle::random_mask(19, 11, 0.4, 2);
  m.set_valid(3, 4, false);
  m.set(3, 4, false);
  io::write_mask_geotiff(dir_ / "m.tif", m);
  EXPECT_EQ(io::read_mask(dir_ / "m.tif"), m);
}

TEST_F(IoTest, SgrdLayoutAndRoundTrip) {
  const auto g = oracle::random_grid(6, 3, Units::linear, 0.1, 1.0, 3, 0.2);
  const auto path = dir_ / "a.sgrd";
  io::write_sgrd(path, g);
  EXPECT_EQ(fs::file_size(path), 44u + 4u * 18u);
  std::ifstream in(path, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  EXPECT_EQ(std::string(magic, 4), "SGRD");

  const auto back = io::read_sgrd(path, Units::linear, "EPSG:32632");
  EXPECT_EQ(back.spec(), g.spec());
  for (std::size_t i = 0; i < g.size(); ++i) {
    ASSERT_EQ(back.valid_at(i), g.valid_at(i));
    if (g.valid_at(i)) {
      EXPECT_EQ(back.values()[i], static_cast<double>(static_cast<float>(g.values()[i])));
    }
  }
  EXPECT_TRUE(io::read_raster(path).spec().crs_id.empty());
}

TEST_F(IoTest, BadInputs) {
  EXPECT_THROW(io::read_raster(dir_ / "missing.tif"), Error);
  EXPECT_THROW(io::read_raster(dir_ / "x.png"), Error);
  std::ofstream(dir_ / "junk.tif") << "not a tiff";
  EXPECT_THROW(io::read_geotiff(dir_ / "junk.tif"), Error);
  std::ofstream(dir_ / "junk.sgrd") << "SGRD";
  EXPECT_THROW(io::read_sgrd(dir_ / "junk.sgrd"), Error);
}

}  // namespace
