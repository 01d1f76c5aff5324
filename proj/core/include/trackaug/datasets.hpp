// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "trackaug/geometry.hpp"
#include "trackaug/mixing.hpp"
#include "trackaug/rng.hpp"

namespace trackaug {

enum class DatasetKind : std::uint8_t { kImage, kSequence };
std::string_view to_string(DatasetKind k) noexcept;
DatasetKind dataset_kind_from_string(std::string_view s);

struct Sequence {
  std::string id;
  std::vector<std::filesystem::path> frames;
  std::vector<BBox> boxes;
  /// Lines with a non-positive or non-finite size mark the target absent.
  std::vector<std::uint8_t> visible;
  std::optional<std::string> category;

  std::size_t visible_count() const noexcept;
};

struct ImageRecord {
  std::int64_t id = 0;
  std::filesystem::path file;
  int width = 0;
  int height = 0;
};

struct ObjectRecord {
  std::int64_t id = 0;
  std::size_t image = 0;  // index into Dataset::images
  BBox box;
  std::optional<std::string> category;
};

/// Immutable after loading; safe to share across workers.
struct Dataset {
  std::string id;
  DatasetKind kind = DatasetKind::kImage;
  std::vector<Sequence> sequences;  // sequence datasets
  std::vector<ImageRecord> images;  // image datasets
  std::vector<ObjectRecord> objects;
  std::size_t skipped_annotations = 0;

  /// Sequences, or images for image datasets.
  std::size_t unit_count() const noexcept;
  /// Distractor-selectable entities: sequences, or objects.
  std::size_t object_count() const noexcept;
  std::string object_id(std::size_t i) const;
  std::optional<std::string> object_category(std::size_t i) const;
};

/// One template/search draw. Image datasets repeat the same frame and box.
struct SamplePair {
  std::filesystem::path template_frame;
  BBox template_box;
  std::filesystem::path search_frame;
  BBox search_box;
  std::optional<std::string> category;
  std::string dataset_id;
  std::string object_id;  // "<dataset>/<sequence>" or "<dataset>/<annotation id>"
  std::size_t object_index = 0;
  int template_frame_index = 0;
  int search_frame_index = 0;

  friend bool operator==(const SamplePair&, const SamplePair&) = default;
};

/// COCO-style JSON: images, annotations with bbox [x, y, w, h], categories.
/// Image paths resolve against `image_root` (default: the annotation file's
/// directory) and are not opened until a sample needs them.
Dataset load_image_dataset(const std::filesystem::path& annotation_path, std::string dataset_id = {},
                           std::optional<std::filesystem::path> image_root = std::nullopt);

/// One directory per sequence holding frame images (directly or under img/)
/// and groundtruth.txt with one "x,y,w,h" line per frame. An optional
/// category.txt supplies the category name.
Dataset load_sequence_dataset(const std::filesystem::path& root, std::string dataset_id = {});

/// Keeps ceil(fraction * units) sequences (or images) chosen uniformly by
/// `seed`, preserving their original order.
Dataset subset_fraction(const Dataset& dataset, double fraction, std::uint64_t seed);

/// Throws kStructural when nothing can be sampled.
SamplePair draw_pair(const Dataset& dataset, RandomSource& rng, int max_frame_gap);
/// Same as draw_pair, restricted to one object (sequence or annotation).
SamplePair draw_pair_for(const Dataset& dataset, std::size_t object_index, RandomSource& rng, int max_frame_gap);

struct ObjectRef {
  std::size_t dataset = 0;
  std::size_t object = 0;
  std::string id;
  std::optional<std::string> category;
};

/// Category lookup over one or more datasets.
class CategoryIndex {
 public:
  CategoryIndex() = default;
  explicit CategoryIndex(const std::vector<const Dataset*>& datasets);

  std::size_t size() const noexcept { return all_.size(); }
  const std::vector<ObjectRef>& objects() const noexcept { return all_; }
  /// Positions in objects() for `category`; empty if unknown.
  const std::vector<std::size_t>& members(const std::string& category) const;
  std::optional<std::size_t> position_of(const std::string& id) const;

 private:
  std::vector<ObjectRef> all_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_category_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

/// Same-category object other than `exclude_id` when one exists (and
/// `same_category_first`), else any other object. Throws kNoDistractor.
ObjectRef select_distractor(const CategoryIndex& index, const std::optional<std::string>& category,
                            const std::string& exclude_id, RandomSource& rng, bool same_category_first = true);

struct EpochFlags {
  bool tfmix_active = false;
};

/// Active when (epoch + phase_offset) mod period == period - 1, i.e. on the
/// last epoch of every period by default.
EpochFlags epoch_schedule(std::uint64_t epoch, const TfmixConfig& cfg);

}  // namespace trackaug
