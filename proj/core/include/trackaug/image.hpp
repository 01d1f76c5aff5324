// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "trackaug/geometry.hpp"

namespace trackaug {

/// Interleaved 8-bit RGB image, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(int w, int h, std::uint8_t fill = 0);

  bool empty() const noexcept { return width <= 0 || height <= 0; }
  std::uint8_t& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  std::uint8_t at(int x, int y, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }

  friend bool operator==(const Image&, const Image&) = default;
};

/// Patch -> image coordinates: image = offset + patch * scale.
struct AffineMap {
  double scale = 1.0;
  Point offset;

  Point to_image(const Point& p) const noexcept { return {offset.x + p.x * scale, offset.y + p.y * scale}; }
  BBox to_image(const BBox& b) const noexcept;
  BBox to_patch(const BBox& b) const noexcept;

  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

/// Square resampled crop. `validity` is 1 where the source sample fell inside
/// the image and 0 where the pixel was filled.
struct Patch {
  int size = 0;
  std::vector<std::uint8_t> pixels;    // size * size * 3
  std::vector<std::uint8_t> validity;  // size * size
  AffineMap to_image;

  Patch() = default;
  explicit Patch(int out_size);

  std::uint8_t& at(int x, int y, int c) { return pixels[(static_cast<std::size_t>(y) * size + x) * 3 + c]; }
  std::uint8_t at(int x, int y, int c) const { return pixels[(static_cast<std::size_t>(y) * size + x) * 3 + c]; }
  bool valid(int x, int y) const { return validity[static_cast<std::size_t>(y) * size + x] != 0; }

  Image as_image() const;

  friend bool operator==(const Patch&, const Patch&) = default;
};

/// Bilinear resample of `crop` into an out_size x out_size patch.
///
/// Output pixel (col, row) samples the source at
///   offset + (col + 0.5, row + 0.5) * scale
/// with source pixel centres at integer + 0.5. Samples outside [0, W) x [0, H)
/// are flagged invalid and filled with the per-channel mean of the valid
/// samples. Throws kEmptyCrop when no sample lands inside the image.
Patch extract_patch(const Image& image, const CropWindow& crop, int out_size);

/// `b` in patch coordinates of the crop resized to `out_size`; not clipped.
BBox map_box_to_patch(const BBox& b, const CropWindow& crop, int out_size);
AffineMap patch_transform(const CropWindow& crop, int out_size);

/// Decodes any format OpenCV can read into RGB. Throws kIo on failure.
Image load_image(const std::filesystem::path& path);
/// Lossless PNG encoding at a fixed compression level.
std::vector<std::uint8_t> encode_png(const Image& image);
void write_png(const std::filesystem::path& path, const Image& image);

}  // namespace trackaug
