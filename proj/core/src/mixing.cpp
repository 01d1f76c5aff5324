// SPDX-License-Identifier: Apache-2.0

#include "trackaug/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "trackaug/error.hpp"

namespace trackaug {

TokenGrid::TokenGrid(int r, int c, int d, int ps)
    : rows(r), cols(c), dim(d), patch_size(ps),
      values(static_cast<std::size_t>(r) * c * d, 0.0) {}

std::span<double> TokenGrid::token(int r, int c) {
  return {values.data() + (static_cast<std::size_t>(r) * cols + c) * dim, static_cast<std::size_t>(dim)};
}

std::span<const double> TokenGrid::token(int r, int c) const {
  return {values.data() + (static_cast<std::size_t>(r) * cols + c) * dim, static_cast<std::size_t>(dim)};
}

TokenMask::TokenMask(int r, int c) : rows(r), cols(c), bits(static_cast<std::size_t>(r) * c, 0) {}

std::size_t TokenMask::count() const noexcept {
  return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](auto b) { return b != 0; }));
}

std::string_view to_string(MixMode m) noexcept {
  switch (m) {
    case MixMode::kTokenFeature: return "token_feature";
    case MixMode::kImageBox: return "image_bbox";
    case MixMode::kImageMask: return "image_mask";
    case MixMode::kTokenImage: return "token_image";
  }
  return "token_feature";
}

MixMode mix_mode_from_string(std::string_view s) {
  if (s == "token_feature") return MixMode::kTokenFeature;
  if (s == "image_bbox") return MixMode::kImageBox;
  if (s == "image_mask") return MixMode::kImageMask;
  if (s == "token_image") return MixMode::kTokenImage;
  fail(ErrorCode::kParse, "unknown mix mode '" + std::string(s) + "'");
}

void TfmixConfig::validate() const {
  require(occl_threshold > 0.0 && occl_threshold <= 1.0, "tfmix: occl_threshold must lie in (0, 1]");
  require(token_overlap_threshold > 0.0 && token_overlap_threshold <= 1.0,
          "tfmix: token_overlap_threshold must lie in (0, 1]");
  require(patch_size >= 1, "tfmix: patch_size must be >= 1");
  require(epoch_period >= 1, "tfmix: epoch_period must be >= 1");
  require(phase_offset >= 0, "tfmix: phase_offset must be >= 0");
  require(max_placement_attempts >= 1, "tfmix: max_placement_attempts must be >= 1");
  require(token_image_min_ratio > 0.0 && token_image_min_ratio <= token_image_max_ratio &&
              token_image_max_ratio <= 1.0,
          "tfmix: token image ratios must satisfy 0 < min <= max <= 1");
}

TokenGrid tokenize(const Patch& patch, int patch_size) {
  require(patch_size >= 1 && patch.size > 0 && patch.size % patch_size == 0,
          "tokenize: patch size " + std::to_string(patch.size) + " is not divisible by " +
              std::to_string(patch_size));
  const int n = patch.size / patch_size;
  TokenGrid grid(n, n, 3 * patch_size * patch_size, patch_size);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      auto tok = grid.token(r, c);
      std::size_t k = 0;
      for (int y = 0; y < patch_size; ++y) {
        for (int x = 0; x < patch_size; ++x) {
          for (int ch = 0; ch < 3; ++ch) tok[k++] = patch.at(c * patch_size + x, r * patch_size + y, ch);
        }
      }
    }
  }
  return grid;
}

void untokenize(const TokenGrid& grid, Patch& patch) {
  const int ps = grid.patch_size;
  require(grid.dim == 3 * ps * ps && grid.rows * ps == patch.size && grid.cols * ps == patch.size,
          "untokenize: grid does not match the identity projection of this patch");
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const auto tok = grid.token(r, c);
      std::size_t k = 0;
      for (int y = 0; y < ps; ++y) {
        for (int x = 0; x < ps; ++x) {
          for (int ch = 0; ch < 3; ++ch) {
            patch.at(c * ps + x, r * ps + y, ch) =
                static_cast<std::uint8_t>(std::clamp(std::lround(tok[k++]), 0L, 255L));
          }
        }
      }
    }
  }
}

LinearProjection::LinearProjection(int in_dim, int out_dim, std::uint64_t seed)
    : in_dim_(in_dim), out_dim_(out_dim), weights_(static_cast<std::size_t>(in_dim) * out_dim) {
  require(in_dim > 0 && out_dim > 0, "LinearProjection: dimensions must be positive");
  RngStream rng(mix64(seed));
  const double a = std::sqrt(3.0 / in_dim);
  for (auto& w : weights_) w = rng.uniform(-a, a);
}

TokenGrid LinearProjection::apply(const TokenGrid& grid) const {
  require(grid.dim == in_dim_, "LinearProjection: token dim mismatch");
  TokenGrid out(grid.rows, grid.cols, out_dim_, grid.patch_size);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const auto src = grid.token(r, c);
      auto dst = out.token(r, c);
      for (int o = 0; o < out_dim_; ++o) {
        const double* w = weights_.data() + static_cast<std::size_t>(o) * in_dim_;
        dst[o] = std::inner_product(src.begin(), src.end(), w, 0.0);
      }
    }
  }
  return out;
}

TokenMask object_token_mask(const BBox& box, int rows, int cols, int patch_size, double overlap_threshold) {
  require(rows >= 1 && cols >= 1 && patch_size >= 1, "object_token_mask: invalid grid");
  require(overlap_threshold > 0.0 && overlap_threshold <= 1.0,
          "object_token_mask: overlap threshold must lie in (0, 1]");
  TokenMask mask(rows, cols);
  const double cell_area = static_cast<double>(patch_size) * patch_size;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const BBox cell{static_cast<double>(c * patch_size), static_cast<double>(r * patch_size),
                      static_cast<double>(patch_size), static_cast<double>(patch_size)};
      if (intersection_area(cell, box) / cell_area >= overlap_threshold) mask.set(r, c);
    }
  }
  return mask;
}

TokenMask object_token_mask(const BBox& box, const TokenGrid& grid, double overlap_threshold) {
  return object_token_mask(box, grid.rows, grid.cols, grid.patch_size, overlap_threshold);
}

TokenStats token_stats(const TokenGrid& grid, const TokenMask& mask) {
  require(mask.rows == grid.rows && mask.cols == grid.cols, "token_stats: mask does not match grid");
  std::size_t n = 0;
  double sum = 0.0;
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      if (!mask.test(r, c)) continue;
      for (double v : grid.token(r, c)) sum += v;
      n += static_cast<std::size_t>(grid.dim);
    }
  }
  if (n == 0) fail(ErrorCode::kEmptyObject, "token_stats: object mask is empty");
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      if (!mask.test(r, c)) continue;
      for (double v : grid.token(r, c)) ss += (v - mean) * (v - mean);
    }
  }
  return {mean, std::sqrt(ss / static_cast<double>(n))};
}

void normalize_transfer(std::span<double> values, const TokenStats& source, const TokenStats& target) {
  if (source.std < kDegenerateStd) {
    std::fill(values.begin(), values.end(), target.mean);
    return;
  }
  const double gain = target.std / source.std;
  for (double& x : values) x = (x - source.mean) * gain + target.mean;
}

namespace {

struct Footprint {
  int row0 = 0;  // bounding rectangle in the source grid
  int col0 = 0;
  int rows = 0;
  int cols = 0;
};

Footprint footprint_of(const TokenMask& mask) {
  int r0 = mask.rows, c0 = mask.cols, r1 = -1, c1 = -1;
  for (int r = 0; r < mask.rows; ++r) {
    for (int c = 0; c < mask.cols; ++c) {
      if (!mask.test(r, c)) continue;
      r0 = std::min(r0, r);
      c0 = std::min(c0, c);
      r1 = std::max(r1, r);
      c1 = std::max(c1, c);
    }
  }
  if (r1 < 0) return {};
  return {r0, c0, r1 - r0 + 1, c1 - c0 + 1};
}

struct Placement {
  int row = 0;
  int col = 0;
  double overlap = 0.0;
  int attempts = 0;
  bool fallback = false;
};

/// Rejection sampling over top-left offsets in [0, max_row] x [0, max_col];
/// falls back to the attempted offset with the least overlap.
template <typename OverlapFn>
Placement place(int max_row, int max_col, double threshold, int max_attempts, RandomSource& rng,
                OverlapFn&& overlap) {
  Placement best;
  best.overlap = std::numeric_limits<double>::infinity();
  for (int a = 1; a <= max_attempts; ++a) {
    const int r = static_cast<int>(rng.index(static_cast<std::size_t>(max_row) + 1));
    const int c = static_cast<int>(rng.index(static_cast<std::size_t>(max_col) + 1));
    const double ov = overlap(r, c);
    if (ov <= threshold) return {r, c, ov, a, false};
    if (ov < best.overlap) {
      best.row = r;
      best.col = c;
      best.overlap = ov;
    }
  }
  best.attempts = max_attempts;
  best.fallback = true;
  return best;
}

}  // namespace

MixOutcome tfmix(const TokenGrid& search, const TokenMask& search_obj, const TokenGrid& distractor,
                 const TokenMask& distractor_obj, const TfmixConfig& cfg, RandomSource& rng) {
  require(search.dim == distractor.dim && search.patch_size == distractor.patch_size,
          "tfmix: search and distractor grids must share dim and patch_size");
  require(search_obj.rows == search.rows && search_obj.cols == search.cols,
          "tfmix: search mask does not match grid");
  require(distractor_obj.rows == distractor.rows && distractor_obj.cols == distractor.cols,
          "tfmix: distractor mask does not match grid");
  const std::size_t n_obj = search_obj.count();
  if (n_obj == 0 || distractor_obj.count() == 0) {
    fail(ErrorCode::kEmptyObject, "tfmix: search and distractor object masks must be non-empty");
  }
  const Footprint fp = footprint_of(distractor_obj);
  if (fp.rows > search.rows || fp.cols > search.cols) {
    fail(ErrorCode::kFootprintTooLarge, "tfmix: distractor footprint exceeds the search grid");
  }

  auto overlap = [&](int dr, int dc) {
    std::size_t hit = 0;
    for (int r = 0; r < fp.rows; ++r) {
      for (int c = 0; c < fp.cols; ++c) {
        if (distractor_obj.test(fp.row0 + r, fp.col0 + c) && search_obj.test(dr + r, dc + c)) ++hit;
      }
    }
    return static_cast<double>(hit) / static_cast<double>(n_obj);
  };

  Placement pl;
  if (cfg.fixed_position) {
    if (fp.row0 + fp.rows > search.rows || fp.col0 + fp.cols > search.cols) {
      fail(ErrorCode::kFootprintTooLarge, "tfmix: distractor position falls outside the search grid");
    }
    pl = {fp.row0, fp.col0, overlap(fp.row0, fp.col0), 1, false};
    pl.fallback = pl.overlap > cfg.occl_threshold;
  } else {
    pl = place(search.rows - fp.rows, search.cols - fp.cols, cfg.occl_threshold,
               cfg.max_placement_attempts, rng, overlap);
  }

  MixOutcome out;
  out.stats_target = token_stats(search, search_obj);
  out.stats_source = token_stats(distractor, distractor_obj);
  out.grid = search;
  out.replaced = TokenMask(search.rows, search.cols);
  for (int r = 0; r < fp.rows; ++r) {
    for (int c = 0; c < fp.cols; ++c) {
      if (!distractor_obj.test(fp.row0 + r, fp.col0 + c)) continue;
      const auto src = distractor.token(fp.row0 + r, fp.col0 + c);
      auto dst = out.grid.token(pl.row + r, pl.col + c);
      std::copy(src.begin(), src.end(), dst.begin());
      normalize_transfer(dst, out.stats_source, out.stats_target);
      out.replaced.set(pl.row + r, pl.col + c);
    }
  }
  out.occluded_fraction = pl.overlap;
  out.fallback = pl.fallback;
  out.attempts = pl.attempts;
  out.offset_row = pl.row;
  out.offset_col = pl.col;
  return out;
}

std::vector<std::uint8_t> box_pixel_mask(const BBox& box, int size) {
  std::vector<std::uint8_t> m(static_cast<std::size_t>(size) * size, 0);
  for (int y = 0; y < size; ++y) {
    const double cy = y + 0.5;
    if (cy < box.y || cy >= box.bottom()) continue;
    for (int x = 0; x < size; ++x) {
      const double cx = x + 0.5;
      if (cx >= box.x && cx < box.right()) m[static_cast<std::size_t>(y) * size + x] = 1;
    }
  }
  return m;
}

namespace {

/// Pastes `src_mask` (bounding rectangle `rect` in the distractor patch) into
/// `search` with pixel-area occlusion control.
ImageMixOutcome paste_pixels(const Patch& search, const BBox& search_box, const Patch& distractor,
                             std::span<const std::uint8_t> src_mask, const PixelRect& rect,
                             const TfmixConfig& cfg, RandomSource& rng) {
  const int s = search.size;
  if (rect.w > s || rect.h > s) {
    fail(ErrorCode::kFootprintTooLarge, "image mix: distractor region exceeds the search patch");
  }
  const auto target = box_pixel_mask(search_box, s);
  const auto n_target = static_cast<std::size_t>(std::count(target.begin(), target.end(), 1));
  auto overlap = [&](int dy, int dx) {
    if (n_target == 0) return 0.0;
    std::size_t hit = 0;
    for (int y = 0; y < rect.h; ++y) {
      for (int x = 0; x < rect.w; ++x) {
        const auto si = static_cast<std::size_t>(rect.y + y) * distractor.size + (rect.x + x);
        const auto di = static_cast<std::size_t>(dy + y) * s + (dx + x);
        if (src_mask[si] != 0 && target[di] != 0) ++hit;
      }
    }
    return static_cast<double>(hit) / static_cast<double>(n_target);
  };
  const Placement pl = place(s - rect.h, s - rect.w, cfg.occl_threshold, cfg.max_placement_attempts, rng, overlap);

  ImageMixOutcome out;
  out.patch = search;
  out.pasted = {pl.col, pl.row, rect.w, rect.h};
  out.occluded_fraction = pl.overlap;
  out.fallback = pl.fallback;
  out.attempts = pl.attempts;
  for (int y = 0; y < rect.h; ++y) {
    for (int x = 0; x < rect.w; ++x) {
      const auto si = static_cast<std::size_t>(rect.y + y) * distractor.size + (rect.x + x);
      if (src_mask[si] == 0) continue;
      const auto di = static_cast<std::size_t>(pl.row + y) * s + (pl.col + x);
      for (int c = 0; c < 3; ++c) out.patch.pixels[di * 3 + c] = distractor.pixels[si * 3 + c];
      out.patch.validity[di] = distractor.validity[si];
      ++out.written;
    }
  }
  return out;
}

}  // namespace

ImageMixOutcome cutmix_bbox(const Patch& search, const BBox& search_box, const Patch& distractor,
                            const BBox& distractor_box, const TfmixConfig& cfg, RandomSource& rng) {
  validate(search_box, "cutmix_bbox(search box)");
  validate(distractor_box, "cutmix_bbox(distractor box)");
  const int ds = distractor.size;
  const int x0 = std::clamp(static_cast<int>(std::floor(distractor_box.x)), 0, ds);
  const int y0 = std::clamp(static_cast<int>(std::floor(distractor_box.y)), 0, ds);
  const int x1 = std::clamp(static_cast<int>(std::ceil(distractor_box.right())), 0, ds);
  const int y1 = std::clamp(static_cast<int>(std::ceil(distractor_box.bottom())), 0, ds);
  if (x1 <= x0 || y1 <= y0) fail(ErrorCode::kEmptyObject, "cutmix_bbox: distractor box lies outside its patch");
  const std::vector<std::uint8_t> all(static_cast<std::size_t>(ds) * ds, 1);
  return paste_pixels(search, search_box, distractor, all, {x0, y0, x1 - x0, y1 - y0}, cfg, rng);
}

ImageMixOutcome paste_mask(const Patch& search, const BBox& search_box, const Patch& distractor,
                           std::span<const std::uint8_t> mask, const TfmixConfig& cfg, RandomSource& rng) {
  const int ds = distractor.size;
  require(mask.size() == static_cast<std::size_t>(ds) * ds, "paste_mask: mask size does not match distractor");
  int x0 = ds, y0 = ds, x1 = -1, y1 = -1;
  for (int y = 0; y < ds; ++y) {
    for (int x = 0; x < ds; ++x) {
      if (mask[static_cast<std::size_t>(y) * ds + x] == 0) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) {
    ImageMixOutcome out;
    out.patch = search;
    return out;
  }
  return paste_pixels(search, search_box, distractor, mask, {x0, y0, x1 - x0 + 1, y1 - y0 + 1}, cfg, rng);
}

TokenImageMixOutcome token_image_mix(const Patch& search, const Patch& distractor, int patch_size,
                                     RandomSource& rng, double min_ratio, double max_ratio) {
  require(search.size == distractor.size, "token_image_mix: patches must have equal size");
  require(patch_size >= 1 && search.size % patch_size == 0, "token_image_mix: size not divisible by patch_size");
  require(min_ratio >= 0.0 && min_ratio <= max_ratio && max_ratio <= 1.0, "token_image_mix: invalid ratio range");
  const int n = search.size / patch_size;
  const std::size_t cells = static_cast<std::size_t>(n) * n;

  TokenImageMixOutcome out;
  out.ratio = rng.uniform(min_ratio, max_ratio);
  const auto k = static_cast<std::size_t>(std::lround(out.ratio * static_cast<double>(cells)));
  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(order[i], order[i + rng.index(cells - i)]);

  out.patch = search;
  out.replaced = TokenMask(n, n);
  for (std::size_t i = 0; i < k; ++i) {
    const int r = static_cast<int>(order[i] / n);
    const int c = static_cast<int>(order[i] % n);
    out.replaced.set(r, c);
    for (int y = r * patch_size; y < (r + 1) * patch_size; ++y) {
      for (int x = c * patch_size; x < (c + 1) * patch_size; ++x) {
        const auto idx = static_cast<std::size_t>(y) * search.size + x;
        for (int ch = 0; ch < 3; ++ch) out.patch.pixels[idx * 3 + ch] = distractor.pixels[idx * 3 + ch];
        out.patch.validity[idx] = distractor.validity[idx];
      }
    }
  }
  return out;
}

}  // namespace trackaug
