// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <set>

#include "fixtures.hpp"
#include "scripted.hpp"
#include "trackaug/datasets.hpp"
#include "trackaug/error.hpp"

namespace trackaug {
namespace {

namespace fs = std::filesystem;

class DatasetTest : public ::testing::Test {
 protected:
  void SetUp() override { fx_ = testing::write_fixtures(tmp_.path()); }

  testing::TempDir tmp_;
  testing::Fixtures fx_;
};

void write_text(const fs::path& p, const std::string& s) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << s;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST_F(DatasetTest, LoadsImageAnnotations) {
  const Dataset ds = load_image_dataset(fx_.coco_annotations, "coco");
  EXPECT_EQ(ds.kind, DatasetKind::kImage);
  EXPECT_EQ(ds.images.size(), 4u);
  EXPECT_EQ(ds.objects.size(), 9u);
  EXPECT_EQ(ds.skipped_annotations, 1u);
  EXPECT_EQ(ds.object_id(0), "coco/1");
  EXPECT_EQ(ds.object_category(4), "dog");
  EXPECT_EQ(ds.objects[2].box, (BBox{100, 80, 80, 50}));
  EXPECT_EQ(ds.images[ds.objects[2].image].id, 101);
  EXPECT_TRUE(fs::exists(ds.images[0].file));
}

TEST_F(DatasetTest, LoadsSequencesWithAbsentFrames) {
  const Dataset ds = load_sequence_dataset(fx_.sequence_root, "seq");
  ASSERT_EQ(ds.sequences.size(), 3u);
  EXPECT_EQ(ds.sequences[0].id, "bird");
  EXPECT_EQ(ds.sequences[0].category, "bird");
  EXPECT_EQ(ds.sequences[0].frames.size(), 12u);
  EXPECT_EQ(ds.sequences[0].visible_count(), 10u);
  EXPECT_EQ(ds.sequences[0].visible[3], 0);
  EXPECT_EQ(ds.sequences[1].boxes[2], (BBox{44, 52, 44, 32}));
  EXPECT_EQ(ds.object_id(2), "seq/car_b");
}

TEST_F(DatasetTest, MalformedAnnotationsReportTheProblem) {
  const fs::path bad = tmp_.path() / "bad.json";
  write_text(bad, "{\"images\": [}");
  EXPECT_EQ(code_of([&] { load_image_dataset(bad); }), ErrorCode::kParse);
  write_text(bad, R"({"images": [{"id": 1, "file_name": "a.png"}], "annotations": [{"id": 1, "image_id": 1, "bbox": [1, 2, 3]}]})");
  try {
    load_image_dataset(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("bbox"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([&] { load_image_dataset(tmp_.path() / "missing.json"); }), ErrorCode::kIo);
}

TEST_F(DatasetTest, SequenceStructuralErrors) {
  const fs::path root = tmp_.path() / "broken";
  fs::create_directories(root / "a" / "img");
  EXPECT_EQ(code_of([&] { load_sequence_dataset(root); }), ErrorCode::kStructural);
  write_text(root / "a" / "groundtruth.txt", "1,2,3,4\n");
  EXPECT_EQ(code_of([&] { load_sequence_dataset(root); }), ErrorCode::kStructural);
  write_text(root / "a" / "img" / "00000001.png", "");
  write_text(root / "a" / "groundtruth.txt", "1,2,x,4\n");
  EXPECT_EQ(code_of([&] { load_sequence_dataset(root); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([&] { load_sequence_dataset(tmp_.path() / "nope"); }), ErrorCode::kIo);
}

TEST_F(DatasetTest, SubsetIsSeededAndSized) {
  const Dataset ds = load_image_dataset(fx_.coco_annotations, "coco");
  const Dataset half = subset_fraction(ds, 0.5, 3);
  EXPECT_EQ(half.images.size(), 2u);
  for (const auto& o : half.objects) EXPECT_LT(o.image, half.images.size());
  const Dataset again = subset_fraction(ds, 0.5, 3);
  ASSERT_EQ(again.images.size(), half.images.size());
  for (std::size_t i = 0; i < half.images.size(); ++i) EXPECT_EQ(again.images[i].id, half.images[i].id);
  EXPECT_EQ(subset_fraction(ds, 1.0, 3).objects.size(), 9u);
  EXPECT_THROW(subset_fraction(ds, 0.0, 3), Error);
}

TEST_F(DatasetTest, ImagePairsUseOneFrame) {
  const Dataset ds = load_image_dataset(fx_.coco_annotations, "coco");
  RngStream rng(1);
  for (int i = 0; i < 200; ++i) {
    const SamplePair p = draw_pair(ds, rng, 5);
    ASSERT_EQ(p.template_frame, p.search_frame);
    ASSERT_EQ(p.template_box, p.search_box);
    ASSERT_EQ(p.dataset_id, "coco");
  }
}

TEST_F(DatasetTest, SequencePairsRespectGapAndVisibility) {
  const Dataset ds = load_sequence_dataset(fx_.sequence_root, "seq");
  RngStream rng(2);
  std::set<int> searched;
  for (int i = 0; i < 3000; ++i) {
    const SamplePair p = draw_pair(ds, rng, 2);
    ASSERT_LE(std::abs(p.search_frame_index - p.template_frame_index), 2);
    const Sequence& seq = ds.sequences[p.object_index];
    ASSERT_TRUE(seq.visible[p.search_frame_index]);
    ASSERT_TRUE(seq.visible[p.template_frame_index]);
    if (p.object_index == 0) searched.insert(p.search_frame_index);
  }
  EXPECT_EQ(searched.size(), 10u);
  EXPECT_FALSE(searched.count(3));
  EXPECT_FALSE(searched.count(7));
}

TEST_F(DatasetTest, DistractorsPreferTheCategoryAndNeverTheQuery) {
  const Dataset coco = load_image_dataset(fx_.coco_annotations, "coco");
  const Dataset seq = load_sequence_dataset(fx_.sequence_root, "seq");
  const CategoryIndex index({&coco, &seq});
  EXPECT_EQ(index.size(), 12u);
  EXPECT_EQ(index.members("car").size(), 6u);
  RngStream rng(3);
  std::map<std::string, int> hits;
  for (int i = 0; i < 6000; ++i) {
    const ObjectRef r = select_distractor(index, std::string("car"), "seq/car_a", rng);
    ASSERT_NE(r.id, "seq/car_a");
    ASSERT_EQ(r.category, "car");
    ++hits[r.id];
  }
  EXPECT_EQ(hits.size(), 5u);
  for (const auto& [id, n] : hits) EXPECT_NEAR(n, 1200, 150) << id;

  // The only dog falls back to any other object.
  for (int i = 0; i < 100; ++i) ASSERT_NE(select_distractor(index, std::string("dog"), "coco/5", rng).id, "coco/5");
}

TEST_F(DatasetTest, NoDistractorWhenOnlyTheQueryExists) {
  const fs::path root = tmp_.path() / "single";
  fs::create_directories(root);
  fs::copy(fx_.sequence_root / "car_a", root / "car_a", fs::copy_options::recursive);
  const Dataset ds = load_sequence_dataset(root, "one");
  const CategoryIndex index({&ds});
  RngStream rng(4);
  EXPECT_EQ(code_of([&] { select_distractor(index, std::string("car"), "one/car_a", rng); }), ErrorCode::kNoDistractor);
}

TEST(Schedule, OneEpochInEachPeriod) {
  TfmixConfig cfg;
  int active = 0;
  for (std::uint64_t e = 0; e < 33; ++e) active += epoch_schedule(e, cfg).tfmix_active;
  EXPECT_EQ(active, 3);
  EXPECT_TRUE(epoch_schedule(10, cfg).tfmix_active);
  EXPECT_TRUE(epoch_schedule(21, cfg).tfmix_active);
  EXPECT_FALSE(epoch_schedule(0, cfg).tfmix_active);
  cfg.phase_offset = 1;
  EXPECT_TRUE(epoch_schedule(9, cfg).tfmix_active);
  cfg.enabled = false;
  EXPECT_FALSE(epoch_schedule(9, cfg).tfmix_active);
  cfg = {};
  cfg.epoch_period = 1;
  EXPECT_TRUE(epoch_schedule(0, cfg).tfmix_active);
}

}  // namespace
}  // namespace trackaug
