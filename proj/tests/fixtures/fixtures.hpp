// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

namespace trackaug::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "trackaug");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

/// Synthetic datasets on disk:
///   coco/annotations.json + coco/images/*.png  4 images, 9 objects, 3 categories
///   seq/<name>/img/*.png + groundtruth.txt     3 sequences of 12 frames; "bird"
///                                              has two absent-target lines
struct Fixtures {
  std::filesystem::path root;
  std::filesystem::path coco_annotations;
  std::filesystem::path sequence_root;
};

Fixtures write_fixtures(const std::filesystem::path& root);

/// Config using both fixture datasets. `overrides` is merged into the
/// generated document (JSON merge-patch).
std::filesystem::path write_config(const Fixtures& fx, const std::filesystem::path& path,
                                   const nlohmann::json& overrides = nlohmann::json::object());

}  // namespace trackaug::testing
