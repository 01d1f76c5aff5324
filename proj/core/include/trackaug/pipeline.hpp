// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trackaug/cropping.hpp"
#include "trackaug/datasets.hpp"
#include "trackaug/gda.hpp"
#include "trackaug/image.hpp"
#include "trackaug/mixing.hpp"

namespace trackaug {

struct DatasetSpec {
  std::string id;
  DatasetKind type = DatasetKind::kImage;
  std::filesystem::path path;  // annotation file or sequence root
  std::optional<std::filesystem::path> image_root;
  double weight = 1.0;
  double fraction = 1.0;

  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

struct OutputConfig {
  std::string manifest_name = "manifest.jsonl";

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  std::vector<DatasetSpec> datasets;
  AugPolicy policy;
  std::uint64_t samples_per_epoch = 1000;
  std::uint64_t epochs = 1;
  int max_frame_gap = 200;
  OutputConfig output;

  void validate() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

struct MixRecord {
  bool active = false;   // epoch schedule enabled mixing
  bool applied = false;  // mixing actually changed the search patch
  MixMode mode = MixMode::kTokenFeature;
  std::string distractor_id;
  double occluded_fraction = 0.0;
  bool fallback = false;
  std::size_t replaced = 0;  // tokens, cells or pixels depending on mode
  std::optional<TokenStats> stats_source;
  std::optional<TokenStats> stats_target;
  std::string skipped;  // reason when active but not applied

  friend bool operator==(const MixRecord&, const MixRecord&) = default;
};

struct TrainingPair {
  std::uint64_t epoch = 0;
  std::uint64_t index = 0;
  SamplePair source;
  Patch template_patch;
  BBox template_box;  // patch coordinates
  CropOutcome template_crop;
  Patch search_patch;
  BBox search_box;  // patch coordinates
  CropOutcome search_crop;
  GdaRecord template_gda;
  GdaRecord search_gda;
  MixRecord mix;

  friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

using FrameLoader = std::function<Image(const std::filesystem::path&)>;

/// Supplies distractor pairs for mixing; returns nullopt when none exists.
using DistractorSource = std::function<std::optional<SamplePair>(const SamplePair& query, RandomSource& rng)>;

/// Assembles one training pair. Every random stage draws from its own
/// stream derived from (seed, sample.dataset_id, epoch, index, stage), so the
/// result does not depend on call order or worker count.
TrainingPair build_training_pair(const SamplePair& sample, const AugPolicy& policy, std::uint64_t seed,
                                 std::uint64_t epoch, std::uint64_t index, const FrameLoader& loader,
                                 const DistractorSource& distractors = {});

/// Fixed, versioned layout for handing batches to training code:
///   search_pixels    count x S x S x 3  uint8, row-major, RGB
///   template_pixels  count x T x T x 3  uint8
///   search_boxes     count x 4          float32 (x, y, w, h), patch coordinates
///   template_boxes   count x 4          float32
///   gammas           count              float32
///   kinds            count              uint8 (CropKind)
///   mix_applied      count              uint8
///   occluded         count              float32
inline constexpr int kBatchLayoutVersion = 1;

struct BatchBuffers {
  int layout_version = kBatchLayoutVersion;
  std::size_t count = 0;
  int search_size = 0;
  int template_size = 0;
  std::vector<std::uint8_t> search_pixels;
  std::vector<std::uint8_t> template_pixels;
  std::vector<float> search_boxes;
  std::vector<float> template_boxes;
  std::vector<float> gammas;
  std::vector<std::uint8_t> kinds;
  std::vector<std::uint8_t> mix_applied;
  std::vector<float> occluded;
};

/// Loaded, validated configuration plus its datasets. Immutable after
/// construction; `sample` and `next_batch` are reentrant.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config, FrameLoader loader = {});
  static Pipeline open(const std::filesystem::path& config_path);

  const PipelineConfig& config() const noexcept { return config_; }
  const std::vector<Dataset>& datasets() const noexcept { return datasets_; }
  const CategoryIndex& categories() const noexcept { return categories_; }

  SamplePair draw_sample(std::uint64_t epoch, std::uint64_t index) const;
  TrainingPair sample(std::uint64_t epoch, std::uint64_t index) const;
  /// Throws kRange when the epoch or index range falls outside the config.
  BatchBuffers next_batch(std::uint64_t epoch, std::uint64_t start_index, std::size_t count,
                          int workers = 1) const;

 private:
  std::optional<SamplePair> distractor_for(const SamplePair& query, RandomSource& rng) const;

  PipelineConfig config_;
  FrameLoader loader_;
  std::vector<Dataset> datasets_;
  CategoryIndex categories_;
  std::vector<double> cumulative_weights_;
};

/// Runs fn(i) for i in [0, n) across `workers` threads; results must be
/// written by index. Exceptions are rethrown in index order.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace trackaug
