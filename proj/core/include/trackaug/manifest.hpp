// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trackaug/pipeline.hpp"

namespace trackaug {

/// First line of every manifest. One compact JSON object per following line,
/// ordered by (epoch, index).
inline constexpr std::string_view kManifestHeader = "#trackaug-manifest v1";

struct ManifestRecord {
  std::uint64_t epoch = 0;
  std::uint64_t index = 0;
  std::string dataset_id;
  std::string object_id;
  std::string template_png;  // relative to the manifest directory
  std::string search_png;
  std::string template_frame;
  std::string search_frame;
  int template_frame_index = 0;
  int search_frame_index = 0;
  BBox template_box;  // patch coordinates
  BBox search_box;
  BBox template_frame_box;  // ground truth in frame coordinates
  BBox search_frame_box;
  AffineMap template_to_image;
  AffineMap search_to_image;
  double gamma = 0.0;
  CropKind kind = CropKind::kNormal;
  int retries = 0;
  std::optional<Direction> direction;
  bool flipped = false;
  std::optional<double> rotate_deg;
  MixRecord mix;
  std::uint64_t seed = 0;
};

std::string manifest_line(const TrainingPair& pair, std::uint64_t seed, const std::string& template_png,
                          const std::string& search_png);
ManifestRecord parse_manifest_line(std::string_view line);

/// Throws kParse on a missing or mismatched header.
std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path);

}  // namespace trackaug
