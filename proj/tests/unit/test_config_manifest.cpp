// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>

#include "fixtures.hpp"
#include "trackaug/config.hpp"
#include "trackaug/error.hpp"
#include "trackaug/manifest.hpp"

namespace trackaug {
namespace {

namespace fs = std::filesystem;

std::string parse_error(std::string_view text) {
  try {
    parse_config(text, "/base");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << text;
  return {};
}

constexpr std::string_view kMinimal = R"({"datasets": [{"id": "a", "type": "image", "path": "ann.json"}]})";

TEST(Config, DefaultsAndRelativePaths) {
  const PipelineConfig c = parse_config(kMinimal, "/base");
  ASSERT_EQ(c.datasets.size(), 1u);
  EXPECT_EQ(c.datasets[0].path, fs::path("/base/ann.json"));
  EXPECT_EQ(c.policy, AugPolicy{});
  EXPECT_EQ(c.samples_per_epoch, 1000u);
}

TEST(Config, DumpParsesBackToTheSameConfig) {
  PipelineConfig c = parse_config(kMinimal, "/base");
  c.seed = 99;
  c.policy.jitter = {3.5, 0.2};
  c.policy.gda.p_rotate = 0.3;
  c.policy.tfmix.mode = MixMode::kImageBox;
  c.policy.tfmix.epoch_period = 4;
  c.datasets[0].image_root = "/imgs";
  c.datasets[0].weight = 2.5;
  EXPECT_EQ(parse_config(dump_config(c), "/elsewhere"), c);
}

TEST(Config, ErrorsNameTheOffendingKey) {
  EXPECT_NE(parse_error(R"({"datasets": [], "sede": 1})").find("'sede'"), std::string::npos);
  EXPECT_NE(parse_error(R"({"policy": {"jitter": {"shift": "big"}}})").find("policy.jitter.shift"), std::string::npos);
  EXPECT_NE(parse_error(R"({"policy": {"tfmix": {"mode": "blend"}}})").find("policy.tfmix.mode"), std::string::npos);
  EXPECT_NE(parse_error(R"({"datasets": [{"id": "a", "type": "video", "path": "x"}]})").find("datasets[0].type"),
            std::string::npos);
  EXPECT_NE(parse_error("{\n\"seed\": 1,\n]").find("line 3"), std::string::npos);
  // Out-of-range values are reported through validation.
  parse_error(R"({"datasets": [{"id": "a", "type": "image", "path": "x"}], "policy": {"gamma_min": 9}})");
  parse_error(R"({"datasets": [{"id": "a", "type": "image", "path": "x"}], "policy": {"p_boundary": -1}})");
}

TEST(Config, MissingFileIsIoError) {
  try {
    load_config("/nonexistent/config.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(Manifest, LinesRoundTripThroughTheParser) {
  testing::TempDir tmp;
  const auto fx = testing::write_fixtures(tmp.path());
  const auto cfg_path = testing::write_config(fx, tmp.path() / "c.json",
                                              {{"policy", {{"p_boundary", 0.5}, {"tfmix", {{"epoch_period", 1}}}}}});
  const Pipeline pipe = Pipeline::open(cfg_path);
  for (std::uint64_t i = 0; i < 8; ++i) {
    const TrainingPair p = pipe.sample(0, i);
    const std::string line = manifest_line(p, 7, "t.png", "s.png");
    EXPECT_EQ(line.find('\n'), std::string::npos);
    const ManifestRecord r = parse_manifest_line(line);
    EXPECT_EQ(r.index, i);
    EXPECT_EQ(r.object_id, p.source.object_id);
    EXPECT_EQ(r.search_png, "s.png");
    EXPECT_EQ(r.search_box, p.search_box);
    EXPECT_EQ(r.search_frame_box, p.source.search_box);
    EXPECT_EQ(r.search_to_image, p.search_patch.to_image);
    EXPECT_EQ(r.gamma, p.search_crop.gamma);
    EXPECT_EQ(r.kind, p.search_crop.kind);
    EXPECT_EQ(r.direction, p.search_crop.direction);
    EXPECT_EQ(r.mix, p.mix);
    EXPECT_EQ(r.seed, 7u);
  }
}

TEST(Manifest, RejectsBadInput) {
  EXPECT_THROW(parse_manifest_line("{not json"), Error);
  testing::TempDir tmp;
  std::ofstream(tmp.path() / "m.jsonl") << "#other v9\n";
  try {
    read_manifest(tmp.path() / "m.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
  EXPECT_THROW(read_manifest(tmp.path() / "absent.jsonl"), Error);
}

}  // namespace
}  // namespace trackaug
