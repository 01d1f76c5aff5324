// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "fixtures.hpp"
#include "json.hpp"
#include "trackaug/image.hpp"
#include "trackaug/manifest.hpp"

namespace trackaug {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "trackaug");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override { fx_ = testing::write_fixtures(tmp_.path()); }

  std::string config(const json& overrides = json::object()) {
    return testing::write_config(fx_, tmp_.path() / ("c" + std::to_string(n_++) + ".json"), overrides).string();
  }
  std::string path(const std::string& name) const { return (tmp_.path() / name).string(); }

  testing::TempDir tmp_;
  testing::Fixtures fx_;
  int n_ = 0;
};

TEST_F(CliTest, AugmentWritesPairsAndIsDeterministic) {
  const std::string cfg = config();
  ASSERT_EQ(cli({"augment", "--config", cfg, "--out", path("a")}).code, 0);
  ASSERT_EQ(cli({"augment", "--config", cfg, "--out", path("b"), "--workers", "4"}).code, 0);
  const auto recs = read_manifest(path("a") + "/manifest.jsonl");
  ASSERT_EQ(recs.size(), 8u);
  int pngs = 0;
  for (const auto& e : fs::recursive_directory_iterator(path("a"))) {
    if (e.path().extension() != ".png") continue;
    ++pngs;
    const fs::path rel = fs::relative(e.path(), path("a"));
    EXPECT_EQ(slurp(e.path()), slurp(fs::path(path("b")) / rel)) << rel;
  }
  EXPECT_EQ(pngs, 16);
  EXPECT_EQ(slurp(path("a") + "/manifest.jsonl"), slurp(path("b") + "/manifest.jsonl"));
  EXPECT_TRUE(fs::exists(path("a") + "/e0000/s_000003.png"));
}

TEST_F(CliTest, ManifestBoxesReprojectToTheFrame) {
  const std::string cfg = config({{"samples_per_epoch", 32},
                                  {"policy", {{"p_boundary", 0.3}, {"gda", {{"p_flip", 0.0}, {"p_rotate", 0.0}}}}}});
  ASSERT_EQ(cli({"augment", "--config", cfg, "--out", path("r")}).code, 0);
  for (const auto& r : read_manifest(path("r") + "/manifest.jsonl")) {
    for (const auto& [patch_box, to_image, frame_box] :
         {std::tuple{r.search_box, r.search_to_image, r.search_frame_box},
          std::tuple{r.template_box, r.template_to_image, r.template_frame_box}}) {
      const BBox back = to_image.to_image(patch_box);
      EXPECT_NEAR(back.x, frame_box.x, 0.5) << r.index;
      EXPECT_NEAR(back.y, frame_box.y, 0.5) << r.index;
      EXPECT_NEAR(back.w, frame_box.w, 0.5) << r.index;
      EXPECT_NEAR(back.h, frame_box.h, 0.5) << r.index;
    }
  }
}

TEST_F(CliTest, EpochRangeSelectsEpochs) {
  const std::string cfg = config({{"epochs", 3}});
  ASSERT_EQ(cli({"augment", "--config", cfg, "--out", path("e"), "--epochs", "1:3"}).code, 0);
  const auto recs = read_manifest(path("e") + "/manifest.jsonl");
  ASSERT_EQ(recs.size(), 16u);
  EXPECT_EQ(recs.front().epoch, 1u);
  EXPECT_EQ(recs.back().epoch, 2u);
  EXPECT_FALSE(fs::exists(path("e") + "/e0000"));
  EXPECT_EQ(cli({"augment", "--config", cfg, "--out", path("x"), "--epochs", "2:1"}).code, 2);
}

TEST_F(CliTest, PreviewGridAndSidecar) {
  const std::string cfg = config({{"policy", {{"p_boundary", 1.0}}}});
  const CliRun r = cli({"preview", "--config", cfg, "--out", path("p/grid.png"), "--n", "9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json side = json::parse(slurp(path("p/grid.json")));
  EXPECT_EQ(side["rows"], 3);
  EXPECT_EQ(side["cols"], 3);
  ASSERT_EQ(side["tiles"].size(), 9u);
  const Image grid = load_image(path("p/grid.png"));
  for (const auto& t : side["tiles"]) {
    EXPECT_EQ(t["kind"], "boundary");
    EXPECT_FALSE(t["direction"].is_null());
    EXPECT_EQ(t["box_rgb"], json({255, 0, 0}));
    // Some edge pixel of the clipped rectangle carries the box colour.
    const int x0 = t["x"], y0 = t["y"], size = t["size"];
    const auto px = t["box_pixels"];
    const int l = std::clamp<int>(px[0], 0, size - 1), top = std::clamp<int>(px[1], 0, size - 1);
    const int rgt = std::clamp<int>(px[2], 0, size - 1), bot = std::clamp<int>(px[3], 0, size - 1);
    bool found = false;
    for (int x = l; x <= rgt && !found; ++x)
      for (int y : {top, bot})
        found |= grid.at(x0 + x, y0 + y, 0) == 255 && grid.at(x0 + x, y0 + y, 1) == 0 && grid.at(x0 + x, y0 + y, 2) == 0;
    for (int y = top; y <= bot && !found; ++y)
      for (int x : {l, rgt})
        found |= grid.at(x0 + x, y0 + y, 0) == 255 && grid.at(x0 + x, y0 + y, 1) == 0 && grid.at(x0 + x, y0 + y, 2) == 0;
    EXPECT_TRUE(found) << t.dump();
  }
  EXPECT_EQ(cli({"preview", "--config", cfg, "--out", path("p/none.png"), "--n", "0"}).code, 2);
}

TEST_F(CliTest, StatsModesWriteReports) {
  ASSERT_EQ(cli({"stats", "--out", path("s"), "--mode", "crop", "--n", "2000"}).code, 0);
  EXPECT_NE(slurp(path("s/crop_orc.txt")).find("uninformative_rate: 0"), std::string::npos);
  ASSERT_EQ(cli({"stats", "--out", path("s"), "--mode", "sweep", "--cropper", "legacy", "--n", "500"}).code, 0);
  const std::string csv = slurp(path("s/sweep_legacy.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 17);
  ASSERT_EQ(cli({"stats", "--out", path("s"), "--mode", "mix", "--n", "200"}).code, 0);
  EXPECT_TRUE(fs::exists(path("s/mix_report.txt")));
  EXPECT_EQ(cli({"stats", "--out", path("s"), "--mode", "bogus"}).code, 2);
  EXPECT_EQ(cli({"stats", "--out", path("s"), "--cropper", "bogus"}).code, 2);
}

TEST_F(CliTest, BenchReportsThroughputAndMatchingDigests) {
  const std::string cfg = config();
  const CliRun r = cli({"bench", "--config", cfg, "--duration", "0", "--n", "8", "--workers", "3", "--out", path("b.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(path("b.json")));
  for (const char* k : {"crops", "pairs", "tfmix"}) {
    EXPECT_EQ(j[k]["single"]["digest"], j[k]["multi"]["digest"]) << k;
    EXPECT_EQ(j[k]["single"]["items"], 8) << k;
    EXPECT_EQ(j[k]["multi"]["workers"], 3) << k;
    EXPECT_TRUE(j.contains(std::string(k) + "_per_second"));
  }
}

TEST_F(CliTest, UsageAndRuntimeErrors) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"augment", "--out", path("z")}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
  const CliRun missing = cli({"augment", "--config", path("nope.json"), "--out", path("z")});
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("trackaug augment:"), std::string::npos);
}

}  // namespace
}  // namespace trackaug
