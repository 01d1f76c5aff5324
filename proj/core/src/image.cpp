// SPDX-License-Identifier: Apache-2.0

#include "trackaug/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "trackaug/error.hpp"

namespace trackaug {

Image::Image(int w, int h, std::uint8_t fill)
    : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {}

BBox AffineMap::to_image(const BBox& b) const noexcept {
  return {offset.x + b.x * scale, offset.y + b.y * scale, b.w * scale, b.h * scale};
}

BBox AffineMap::to_patch(const BBox& b) const noexcept {
  return {(b.x - offset.x) / scale, (b.y - offset.y) / scale, b.w / scale, b.h / scale};
}

Patch::Patch(int out_size)
    : size(out_size),
      pixels(static_cast<std::size_t>(out_size) * out_size * 3, 0),
      validity(static_cast<std::size_t>(out_size) * out_size, 1) {}

Image Patch::as_image() const {
  Image img;
  img.width = size;
  img.height = size;
  img.data = pixels;
  return img;
}

AffineMap patch_transform(const CropWindow& crop, int out_size) {
  validate(crop.box, "patch_transform");
  require(out_size > 0, "patch_transform: out_size must be positive");
  return AffineMap{crop.side() / out_size, {crop.box.x, crop.box.y}};
}

Patch extract_patch(const Image& image, const CropWindow& crop, int out_size) {
  require(!image.empty(), "extract_patch: empty image");
  require(out_size >= 16, "extract_patch: out_size must be >= 16");
  validate(crop.box, "extract_patch");
  const BBox frame{0.0, 0.0, static_cast<double>(image.width), static_cast<double>(image.height)};
  if (intersection_area(crop.box, frame) <= 0.0) {
    fail(ErrorCode::kEmptyCrop, "extract_patch: crop lies entirely outside the image");
  }

  Patch patch(out_size);
  patch.to_image = patch_transform(crop, out_size);
  const double scale = patch.to_image.scale;
  const int w = image.width;
  const int h = image.height;

  // Column taps are the same for every row.
  struct Tap {
    int x0, x1;
    double fx;
    bool in;
  };
  std::vector<Tap> taps(static_cast<std::size_t>(out_size));
  for (int col = 0; col < out_size; ++col) {
    const double sx = crop.box.x + (col + 0.5) * scale;
    const double u = sx - 0.5;
    const double fx0 = std::floor(u);
    taps[col] = {std::clamp(static_cast<int>(fx0), 0, w - 1), std::clamp(static_cast<int>(fx0) + 1, 0, w - 1),
                 u - fx0, sx >= 0.0 && sx < w};
  }

  std::array<std::uint64_t, 3> sum{0, 0, 0};
  std::size_t n_valid = 0;
  for (int row = 0; row < out_size; ++row) {
    const double sy = crop.box.y + (row + 0.5) * scale;
    const bool row_in = sy >= 0.0 && sy < h;
    const double v = sy - 0.5;
    const double fy0 = std::floor(v);
    const double fy = v - fy0;
    const int y0 = std::clamp(static_cast<int>(fy0), 0, h - 1);
    const int y1 = std::clamp(static_cast<int>(fy0) + 1, 0, h - 1);
    const std::uint8_t* r0 = image.data.data() + static_cast<std::size_t>(y0) * w * 3;
    const std::uint8_t* r1 = image.data.data() + static_cast<std::size_t>(y1) * w * 3;
    for (int col = 0; col < out_size; ++col) {
      const Tap& t = taps[col];
      const std::size_t idx = static_cast<std::size_t>(row) * out_size + col;
      if (!row_in || !t.in) {
        patch.validity[idx] = 0;
        continue;
      }
      const std::uint8_t* a = r0 + t.x0 * 3;
      const std::uint8_t* b = r0 + t.x1 * 3;
      const std::uint8_t* c0 = r1 + t.x0 * 3;
      const std::uint8_t* d = r1 + t.x1 * 3;
      for (int c = 0; c < 3; ++c) {
        const double top = a[c] * (1.0 - t.fx) + b[c] * t.fx;
        const double bot = c0[c] * (1.0 - t.fx) + d[c] * t.fx;
        const double val = top * (1.0 - fy) + bot * fy;
        // val is in [0, 255], so truncating val + 0.5 rounds half away from zero.
        const auto px = static_cast<std::uint8_t>(std::min(255.0, val + 0.5));
        patch.pixels[idx * 3 + c] = px;
        sum[c] += px;
      }
      ++n_valid;
    }
  }
  if (n_valid == 0) {
    fail(ErrorCode::kEmptyCrop, "extract_patch: no sample of the crop falls inside the image");
  }
  if (n_valid < patch.validity.size()) {
    std::array<std::uint8_t, 3> fill{};
    for (int c = 0; c < 3; ++c) {
      fill[c] = static_cast<std::uint8_t>((sum[c] + n_valid / 2) / n_valid);
    }
    for (std::size_t i = 0; i < patch.validity.size(); ++i) {
      if (patch.validity[i] != 0) continue;
      for (int c = 0; c < 3; ++c) patch.pixels[i * 3 + c] = fill[c];
    }
  }
  return patch;
}

BBox map_box_to_patch(const BBox& b, const CropWindow& crop, int out_size) {
  validate(b, "map_box_to_patch");
  return patch_transform(crop, out_size).to_patch(b);
}

Image load_image(const std::filesystem::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) fail(ErrorCode::kIo, "cannot read image '" + path.string() + "'");
  Image img(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* src = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      img.at(x, y, 0) = src[x][2];
      img.at(x, y, 1) = src[x][1];
      img.at(x, y, 2) = src[x][0];
    }
  }
  return img;
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  require(!image.empty(), "encode_png: empty image");
  cv::Mat bgr(image.height, image.width, CV_8UC3);
  for (int y = 0; y < image.height; ++y) {
    auto* dst = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < image.width; ++x) {
      dst[x] = cv::Vec3b(image.at(x, y, 2), image.at(x, y, 1), image.at(x, y, 0));
    }
  }
  std::vector<std::uint8_t> out;
  const std::vector<int> params{cv::IMWRITE_PNG_COMPRESSION, 3};
  if (!cv::imencode(".png", bgr, out, params)) fail(ErrorCode::kIo, "PNG encoding failed");
  return out;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  const auto bytes = encode_png(image);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

}  // namespace trackaug
