#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "star/config.hpp"
#include "star/cube.hpp"
#include "star/error.hpp"
#include "star/hash.hpp"
#include "star/io.hpp"
#include "star/pipeline.hpp"
#include "star/synth.hpp"
#include "star/time.hpp"

namespace fs = std::filesystem;

namespace {

using namespace star;

class CubeTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("star_cube_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_ / "src");
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string write_band(const std::string& name, const RasterGrid& g) {
    const auto p = root_ / "src" / name;
    io::write_raster(p, g);
    return p.string();
  }

  cube::SceneManifest meta(const std::string& id, const std::string& vv) {
    cube::SceneManifest m;
    m.scene_id = id;
    m.acquired = parse_utc("2022-09-21");
    m.bands["VV"] = vv;
    return m;
  }

  fs::path root_;
};

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::parameter;
}

std::string what_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

TEST_F(CubeTest, IngestRecordsVvBand) {
  cube::Cube c(root_ / "cube");
  const auto vv = write_band("vv.tif", oracle::random_grid(100, 100, Units::dB, -25, 0, 1));
  const auto out = cube::ingest(c, meta("s1", vv));
  EXPECT_EQ(out.bands.at("VV"), "VV.tif");
  EXPECT_EQ(out.width, 100);
  EXPECT_EQ(out.crs_id, "EPSG:32632");
  ASSERT_EQ(c.scenes().size(), 1u);
  EXPECT_EQ(c.scene("s1"), out);
  EXPECT_TRUE(fs::exists(c.scene_dir("s1") / "meta.json"));
  EXPECT_EQ(c.load_band(out, "VV").units(), Units::dB);
}

TEST_F(CubeTest, LinearInputIsStoredInDb) {
  cube::Cube c(root_ / "cube");
  const auto vv = write_band("vv.tif", RasterGrid(oracle::metric_spec(8, 8), Units::linear, 0.1));
  const auto out = cube::ingest(c, meta("lin", vv));
  EXPECT_NEAR(c.load_band(out, "VV").at(3, 3), -10.0, 1e-5);
}

TEST_F(CubeTest, DeclaredDimsMustMatch) {
  cube::Cube c(root_ / "cube");
  const auto vv = write_band("vv.tif", oracle::random_grid(90, 100, Units::dB, -25, 0, 1));
  auto m = meta("s1", vv);
  m.width = 100;
  m.height = 100;
  EXPECT_EQ(kind_of([&] { cube::ingest(c, m); }), ErrorKind::ingest);
  const auto msg = what_of([&] { cube::ingest(c, m); });
  EXPECT_NE(msg.find("dims"), std::string::npos) << msg;
  EXPECT_NE(msg.find("90x100"), std::string::npos) << msg;
}

TEST_F(CubeTest, ReingestOverwrites) {
  cube::Cube c(root_ / "cube");
  const auto a = write_band("a.tif", RasterGrid(oracle::metric_spec(8, 8), Units::dB, -5.0));
  const auto b = write_band("b.tif", RasterGrid(oracle::metric_spec(8, 8), Units::dB, -7.0));
  cube::ingest(c, meta("s1", a));
  const auto out = cube::ingest(c, meta("s1", b));
  EXPECT_EQ(c.scenes().size(), 1u);
  EXPECT_EQ(c.load_band(out, "VV").at(0, 0), -7.0);
}

TEST_F(CubeTest, MissingCrsNamesTheField) {
  cube::Cube c(root_ / "cube");
  const auto vv = write_band("vv.sgrd", oracle::random_grid(8, 8, Units::dB, -25, 0, 1));
  const auto msg = what_of([&] { cube::ingest(c, meta("s1", vv)); });
  EXPECT_NE(msg.find("crs_id"), std::string::npos) << msg;
  auto m = meta("s1", vv);
  m.crs_id = "EPSG:32632";
  EXPECT_EQ(cube::ingest(c, m).crs_id, "EPSG:32632");
}

TEST_F(CubeTest, RejectsBadMetadata) {
  cube::Cube c(root_ / "cube");
  const auto vv = write_band("vv.tif", RasterGrid(oracle::metric_spec(8, 8), Units::dB, -5.0));
  auto m = meta("s1", vv);
  m.bands.clear();
  EXPECT_EQ(kind_of([&] { cube::ingest(c, m); }), ErrorKind::ingest);
  m = meta("../x", vv);
  EXPECT_EQ(kind_of([&] { cube::ingest(c, m); }), ErrorKind::ingest);
  m = meta("s1", vv);
  m.bands["angle"] = write_band("ang.tif", RasterGrid(oracle::metric_spec(9, 8), Units::degrees, 35.0));
  EXPECT_EQ(kind_of([&] { cube::ingest(c, m); }), ErrorKind::ingest);
  EXPECT_EQ(kind_of([&] { c.scene("nope"); }), ErrorKind::not_found);
}

TEST(Manifest, JsonRoundTrip) {
  cube::SceneManifest m;
  m.scene_id = "S1A_x";
  m.acquired = parse_utc("2022-09-21T05:12:33Z");
  m.orbit_pass = OrbitPass::DESC;
  m.relative_orbit = 51;
  m.bands = {{"VV", "VV.tif"}, {"angle", "angle.tif"}};
  m.crs_id = "EPSG:32632";
  m.transform = {500000, 5000000, 10, -10};
  m.looks = 4.9;
  m.width = 512;
  m.height = 256;
  EXPECT_EQ(cube::manifest_from_json(cube::to_json(m)), m);
  const auto j = nlohmann::json::parse(cube::to_json(m));
  for (const char* key : {"scene_id", "acquired", "orbit_pass", "relative_orbit", "bands", "crs_id", "transform", "looks"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(kind_of([] { cube::manifest_from_json("{"); }), ErrorKind::ingest);
}

TEST(Config, DefaultsRoundTripThroughText) {
  const PipelineConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(to_text(parse_config(to_text(cfg))), to_text(cfg));
}

TEST(Config, MaskExtremesAfterToLinearIsRejected) {
  const auto text = "pipeline.steps = mask_border_angle, to_linear, mask_extremes, speckle, to_db\n";
  EXPECT_EQ(kind_of([&] { parse_config(text); }), ErrorKind::config);
  EXPECT_EQ(exit_code(ErrorKind::config), 2);
}

TEST(Config, UnknownAndDuplicateKeys) {
  const auto unknown = what_of([] { parse_config("# comment\nspeckle.radius = 2\nspeckle.radus = 3\n"); });
  EXPECT_NE(unknown.find("line 3"), std::string::npos) << unknown;
  EXPECT_EQ(kind_of([] { parse_config("flood.bins = 128\nflood.bins = 64\n"); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { parse_config("flood.bins 128\n"); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { parse_config("speckle.filter = median\n"); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { parse_config("area.m_per_deg_x = 111000\n"); }), ErrorKind::config);
}

TEST(Config, ParsesValues) {
  const auto cfg = parse_config(
      "speckle.filter = refined_lee\nspeckle.looks = 2.5\nflood.cell_px = 32\ncomposite.stat = mean\n"
      "objects.connectivity = four\nwindow.pre = 2022-07-01/2022-07-31\n");
  EXPECT_EQ(cfg.filter, speckle::Filter::refined_lee);
  EXPECT_EQ(cfg.speckle.looks, 2.5);
  EXPECT_EQ(cfg.cell_px, 32);
  EXPECT_EQ(cfg.composite_stat, temporal::Stat::mean);
  EXPECT_EQ(cfg.connectivity, objects::Connectivity::four);
  EXPECT_EQ(cfg.window_pre, "2022-07-01/2022-07-31");
}

TEST(Synth, ClassMeansAtSingleLook) {
  synth::SynthSpec spec;
  spec.width = 256;
  spec.height = 256;
  spec.looks = 1.0;
  spec.seed = 42;
  spec.water.push_back(synth::Polygon::rect(0, 0, 128, 256));
  const auto s = synth::generate(spec);
  double sum[2] = {0, 0};
  std::size_t n[2] = {0, 0};
  for (int y = 0; y < 256; ++y) {
    for (int x = 0; x < 256; ++x) {
      const int c = s.water.at(x, y) ? 1 : 0;
      sum[c] += std::pow(10.0, s.observed_db.at(x, y) / 10.0);
      ++n[c];
    }
  }
  ASSERT_GE(n[0], 128u * 128u);
  ASSERT_GE(n[1], 128u * 128u);
  EXPECT_NEAR(sum[0] / n[0] / std::pow(10.0, -0.8), 1.0, 0.03);
  EXPECT_NEAR(sum[1] / n[1] / std::pow(10.0, -2.2), 1.0, 0.03);
}

TEST(Synth, HighLookCountApproachesTruth) {
  synth::SynthSpec spec;
  spec.width = 128;
  spec.height = 128;
  spec.looks = 512.0;
  spec.seed = 3;
  spec.water.push_back(synth::Polygon::rect(10, 10, 60, 90));
  const auto s = synth::generate(spec);
  std::vector<double> rel;
  for (std::size_t i = 0; i < s.observed_db.size(); ++i) {
    // Amplitude ratio; intensity at L=512 still spreads about 11% at the 99th percentile.
    const double ratio = std::pow(10.0, (s.observed_db.values()[i] - s.truth_db.values()[i]) / 20.0);
    rel.push_back(std::abs(ratio - 1.0));
  }
  std::sort(rel.begin(), rel.end());
  EXPECT_LE(rel[static_cast<std::size_t>(0.99 * static_cast<double>(rel.size()))], 0.07);
}

TEST(Synth, SameSeedSameScene) {
  synth::SynthSpec spec;
  spec.width = 64;
  spec.height = 64;
  spec.seed = 9;
  spec.targets.push_back({5, 5, 12.0});
  spec.slope = synth::SlopePlane{0.05, 0.0};
  const auto a = synth::generate(spec);
  const auto b = synth::generate(spec);
  EXPECT_TRUE(std::equal(a.observed_db.values().begin(), a.observed_db.values().end(), b.observed_db.values().begin()));
  EXPECT_TRUE(std::equal(a.dem.values().begin(), a.dem.values().end(), b.dem.values().begin()));
  EXPECT_EQ(a.observed_db.at(5, 5), 12.0);
  spec.seed = 10;
  EXPECT_NE(synth::generate(spec).observed_db.at(20, 20), a.observed_db.at(20, 20));
}

TEST(Synth, WaterMaskDimsMustMatch) {
  synth::SynthSpec spec;
  spec.width = 32;
  spec.height = 32;
  spec.water_mask = BinaryMask(oracle::metric_spec(16, 32));
  EXPECT_EQ(kind_of([&] { synth::generate(spec); }), ErrorKind::parameter);
}

TEST(Polygon, PixelCentreContainment) {
  const auto r = synth::Polygon::rect(2, 2, 4, 4);
  EXPECT_TRUE(r.contains(2.5, 3.5));
  EXPECT_FALSE(r.contains(4.5, 3.5));
  const synth::Polygon tri{{{0, 0}, {10, 0}, {0, 10}}};
  EXPECT_TRUE(tri.contains(2.5, 2.5));
  EXPECT_FALSE(tri.contains(7.5, 7.5));
}

class PipelineTest : public CubeTest {
 protected:
  void plant(const std::string& id, const std::string& date, std::vector<synth::Polygon> water, std::uint64_t seed) {
    synth::SynthSpec spec;
    spec.scene_id = id;
    spec.acquired = parse_utc(date);
    spec.width = 128;
    spec.height = 128;
    spec.seed = seed;
    spec.water = std::move(water);
    synth::write_to_cube(cube_, spec);
  }
  PipelineConfig config() {
    PipelineConfig cfg;
    cfg.window_pre = "2022-09-01";
    cfg.window_during = "2022-09-21";
    return cfg;
  }
  cube::Cube cube_{fs::temp_directory_path() /
                   ("star_pipe_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()))};
  void TearDown() override {
    fs::remove_all(cube_.root());
    CubeTest::TearDown();
  }
};

TEST_F(PipelineTest, RecoversPlantedFloodAndWritesArtifacts) {
  const auto a = synth::Polygon::rect(32, 16, 64, 112);
  const auto b = synth::Polygon::rect(72, 16, 112, 112);
  plant("pre", "2022-09-01", {a}, 1);
  plant("during", "2022-09-21", {a, b}, 2);
  const auto r = run_pipeline(config(), cube_, "t1");
  EXPECT_NEAR(static_cast<double>(r.report.flood_px), 40.0 * 96.0, 0.05 * 40.0 * 96.0);
  EXPECT_EQ(r.report.date_pre, "2022-09-01");
  EXPECT_EQ(r.report.date_during, "2022-09-21");
  for (const char* f : {"report.csv", "provenance.json", "pre_water.tif", "during_water.tif", "flood.tif",
                        "composite/pre.tif", "composite/during.tif", "speckle/pre_VV.tif",
                        "speckle/pre_VV.prov.json"}) {
    EXPECT_TRUE(fs::exists(r.run_dir / f)) << f;
  }
  std::ifstream in(r.run_dir / "speckle" / "during_VV.prov.json");
  const auto prov = nlohmann::json::parse(in);
  EXPECT_EQ(prov.at("step"), "speckle");
  EXPECT_EQ(prov.at("scene_id"), "during");
  for (const auto& input : prov.at("inputs")) {
    EXPECT_EQ(input.at("sha256").get<std::string>(),
              sha256_file(cube_.root() / input.at("path").get<std::string>()));
  }
}

TEST_F(PipelineTest, OmittedSpeckleStepIsRecordedAsSkipped) {
  plant("pre", "2022-09-01", {synth::Polygon::rect(32, 16, 64, 112)}, 1);
  plant("during", "2022-09-21", {synth::Polygon::rect(32, 16, 100, 112)}, 2);
  auto cfg = config();
  cfg.steps = {Step::mask_border_angle, Step::mask_extremes, Step::smooth};
  run_pipeline(cfg, cube_, "nospeckle");
  const auto text = report(cube_, "nospeckle");
  EXPECT_NE(text.find("speckle"), std::string::npos);
  EXPECT_NE(text.find("skipped"), std::string::npos);
  EXPECT_NE(text.find("not in pipeline.steps"), std::string::npos);
}

TEST_F(PipelineTest, SameSceneInBothWindowsHasNoFlood) {
  plant("only", "2022-09-10", {synth::Polygon::rect(32, 16, 64, 112)}, 1);
  auto cfg = config();
  cfg.window_pre = "2022-09-01/2022-09-30";
  cfg.window_during = "2022-09-01/2022-09-30";
  const auto r = run_pipeline(cfg, cube_, "same");
  EXPECT_EQ(r.report.flood_px, 0u);
  EXPECT_EQ(r.report.flood_km2, 0.0);
  const auto text = report(cube_, "same");
  const auto header = text.substr(0, text.find('\n'));
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 7);
}

TEST_F(PipelineTest, DifferentSeedsSameSchemaDifferentCounts) {
  const auto a = synth::Polygon::rect(32, 16, 64, 112);
  const auto b = synth::Polygon::rect(72, 16, 112, 112);
  plant("pre", "2022-09-01", {a}, 1);
  plant("during", "2022-09-21", {a, b}, 2);
  const auto r1 = run_pipeline(config(), cube_, "s1");
  plant("during", "2022-09-21", {a, b}, 3);
  const auto r2 = run_pipeline(config(), cube_, "s2");
  EXPECT_NE(r1.report.during_water_px, r2.report.during_water_px);
  const auto h1 = report(cube_, "s1");
  const auto h2 = report(cube_, "s2");
  EXPECT_EQ(h1.substr(0, h1.find('\n')), h2.substr(0, h2.find('\n')));
}

TEST_F(PipelineTest, UnknownRunAndEmptyWindow) {
  EXPECT_EQ(kind_of([&] { report(cube_, "missing"); }), ErrorKind::not_found);
  plant("pre", "2022-09-01", {}, 1);
  EXPECT_THROW(run_pipeline(config(), cube_, "x"), Error);
  EXPECT_THROW(run_pipeline(config(), cube_, "a/b"), Error);
}

}  // namespace
