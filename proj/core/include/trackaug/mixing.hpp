// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trackaug/image.hpp"

namespace trackaug {

/// Per-token feature vectors over a rows x cols grid of square cells.
struct TokenGrid {
  int rows = 0;
  int cols = 0;
  int dim = 0;
  int patch_size = 0;
  std::vector<double> values;  // row-major tokens, `dim` values each

  TokenGrid() = default;
  TokenGrid(int rows, int cols, int dim, int patch_size);

  std::size_t token_count() const noexcept { return static_cast<std::size_t>(rows) * cols; }
  std::span<double> token(int r, int c);
  std::span<const double> token(int r, int c) const;

  friend bool operator==(const TokenGrid&, const TokenGrid&) = default;
};

struct TokenMask {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> bits;

  TokenMask() = default;
  TokenMask(int rows, int cols);

  bool test(int r, int c) const { return bits[static_cast<std::size_t>(r) * cols + c] != 0; }
  void set(int r, int c, bool v = true) { bits[static_cast<std::size_t>(r) * cols + c] = v ? 1 : 0; }
  std::size_t count() const noexcept;

  friend bool operator==(const TokenMask&, const TokenMask&) = default;
};

/// Global scalar mean and population standard deviation.
struct TokenStats {
  double mean = 0.0;
  double std = 0.0;

  friend bool operator==(const TokenStats&, const TokenStats&) = default;
};

enum class MixMode : std::uint8_t {
  kTokenFeature,  // normalized token transfer
  kImageBox,      // rectangular paste of the distractor box
  kImageMask,     // paste of mask pixels only
  kTokenImage,    // swap 30-50% of co-located cells
};
std::string_view to_string(MixMode m) noexcept;
MixMode mix_mode_from_string(std::string_view s);

struct TfmixConfig {
  bool enabled = true;
  MixMode mode = MixMode::kTokenFeature;
  double occl_threshold = 0.5;
  int patch_size = 16;
  double token_overlap_threshold = 0.5;
  bool same_category_first = true;
  int epoch_period = 11;
  /// Added to the epoch before the period test; shifts the active phase.
  int phase_offset = 0;
  int max_placement_attempts = 10;
  /// Keep distractor tokens at their own grid coordinates instead of drawing
  /// a random offset.
  bool fixed_position = false;
  double token_image_min_ratio = 0.3;
  double token_image_max_ratio = 0.5;

  void validate() const;

  friend bool operator==(const TfmixConfig&, const TfmixConfig&) = default;
};

struct MixOutcome {
  TokenGrid grid;
  TokenMask replaced;
  double occluded_fraction = 0.0;
  /// True when no attempted placement met the threshold and the one with the
  /// smallest overlap was used.
  bool fallback = false;
  int attempts = 0;
  int offset_row = 0;  // grid position of the footprint's top-left cell
  int offset_col = 0;
  std::string distractor_id;
  TokenStats stats_source;  // distractor object tokens
  TokenStats stats_target;  // search object tokens, before replacement
};

/// Identity projection: token (r, c) is the raster-order RGB of its cell,
/// dim = 3 * patch_size^2. Throws when the patch is not divisible.
TokenGrid tokenize(const Patch& patch, int patch_size);
/// Inverse of the identity projection; values are rounded and clamped.
void untokenize(const TokenGrid& grid, Patch& patch);

/// Seeded dense map applied after tokenize, for exercising dim != 3 * ps^2.
class LinearProjection {
 public:
  LinearProjection(int in_dim, int out_dim, std::uint64_t seed);
  TokenGrid apply(const TokenGrid& grid) const;
  int in_dim() const noexcept { return in_dim_; }
  int out_dim() const noexcept { return out_dim_; }

 private:
  int in_dim_;
  int out_dim_;
  std::vector<double> weights_;  // out_dim x in_dim
};

/// Cell (r, c) is set iff area(cell & box) / area(cell) >= overlap_threshold.
TokenMask object_token_mask(const BBox& box_in_patch, int rows, int cols, int patch_size,
                            double overlap_threshold);
TokenMask object_token_mask(const BBox& box_in_patch, const TokenGrid& grid, double overlap_threshold);

/// Throws kEmptyObject for an empty mask.
TokenStats token_stats(const TokenGrid& grid, const TokenMask& mask);

/// Below this source deviation every element maps to the target mean.
inline constexpr double kDegenerateStd = 1e-8;

/// x -> (x - mean_d) / std_d * std_s + mean_s, in place.
void normalize_transfer(std::span<double> values, const TokenStats& source, const TokenStats& target);

MixOutcome tfmix(const TokenGrid& search, const TokenMask& search_obj, const TokenGrid& distractor,
                 const TokenMask& distractor_obj, const TfmixConfig& cfg, RandomSource& rng);

/// Pixel-level integer rectangle.
struct PixelRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

struct ImageMixOutcome {
  Patch patch;
  PixelRect pasted;  // destination rectangle in the search patch
  double occluded_fraction = 0.0;
  bool fallback = false;
  int attempts = 0;
  std::size_t written = 0;  // pixels overwritten
};

/// Pixels whose centres lie in `box`, clipped to a size x size patch.
std::vector<std::uint8_t> box_pixel_mask(const BBox& box, int size);

/// Pastes the distractor-box rectangle (edges floored/ceiled, clipped) 1:1 at
/// a random position, redrawing while the covered share of the target's
/// pixels exceeds cfg.occl_threshold.
ImageMixOutcome cutmix_bbox(const Patch& search, const BBox& search_box, const Patch& distractor,
                            const BBox& distractor_box, const TfmixConfig& cfg, RandomSource& rng);

/// Like cutmix_bbox but only mask-true distractor pixels are written. `mask`
/// is distractor.size^2 bytes.
ImageMixOutcome paste_mask(const Patch& search, const BBox& search_box, const Patch& distractor,
                           std::span<const std::uint8_t> mask, const TfmixConfig& cfg, RandomSource& rng);

struct TokenImageMixOutcome {
  Patch patch;
  TokenMask replaced;
  double ratio = 0.0;
};

/// Replaces round(ratio * N) uniformly chosen cells with the distractor's
/// co-located cells, ratio ~ Uniform(min_ratio, max_ratio).
TokenImageMixOutcome token_image_mix(const Patch& search, const Patch& distractor, int patch_size,
                                     RandomSource& rng, double min_ratio = 0.3, double max_ratio = 0.5);

}  // namespace trackaug
