// SPDX-License-Identifier: Apache-2.0

#include "trackaug/gda.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "trackaug/error.hpp"

namespace trackaug {

namespace {

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

void GdaConfig::validate() const {
  require(is_probability(p_gray) && is_probability(p_flip) && is_probability(p_brightness) &&
              is_probability(p_blur) && is_probability(p_rotate),
          "gda: probabilities must lie in [0, 1]");
  require(brightness_magnitude >= 0.0 && brightness_magnitude < 1.0,
          "gda: brightness_magnitude must lie in [0, 1)");
  require(blur_sigma_min > 0.0 && blur_sigma_max >= blur_sigma_min && std::isfinite(blur_sigma_max),
          "gda: blur sigmas must be positive with min <= max");
  require(rotate_max_deg >= 0.0 && rotate_max_deg <= 45.0, "gda: rotate_max_deg must lie in [0, 45]");
}

GdaConfig GdaConfig::disabled() {
  GdaConfig cfg;
  cfg.p_gray = cfg.p_flip = cfg.p_brightness = cfg.p_blur = cfg.p_rotate = 0.0;
  return cfg;
}

void to_grayscale(Patch& patch) {
  for (std::size_t i = 0; i + 2 < patch.pixels.size(); i += 3) {
    const unsigned r = patch.pixels[i];
    const unsigned g = patch.pixels[i + 1];
    const unsigned b = patch.pixels[i + 2];
    const auto y = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
    patch.pixels[i] = patch.pixels[i + 1] = patch.pixels[i + 2] = y;
  }
}

void flip_horizontal(Patch& patch, BBox& box) {
  const int s = patch.size;
  for (int y = 0; y < s; ++y) {
    for (int x = 0; x < s / 2; ++x) {
      const int m = s - 1 - x;
      for (int c = 0; c < 3; ++c) std::swap(patch.at(x, y, c), patch.at(m, y, c));
      std::swap(patch.validity[static_cast<std::size_t>(y) * s + x],
                patch.validity[static_cast<std::size_t>(y) * s + m]);
    }
  }
  box.x = s - box.x - box.w;
}

void scale_brightness(Patch& patch, double factor) {
  for (auto& v : patch.pixels) v = to_byte(v * factor);
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma >= 0.3)) return {1.0};
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

std::vector<double> gaussian_blur_plane(const std::vector<double>& plane, int size, double sigma) {
  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  std::vector<double> tmp(plane.size(), 0.0);
  std::vector<double> out(plane.size(), 0.0);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        const int xx = std::clamp(x + i, 0, size - 1);
        acc += k[static_cast<std::size_t>(i + r)] * plane[static_cast<std::size_t>(y) * size + xx];
      }
      tmp[static_cast<std::size_t>(y) * size + x] = acc;
    }
  }
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        const int yy = std::clamp(y + i, 0, size - 1);
        acc += k[static_cast<std::size_t>(i + r)] * tmp[static_cast<std::size_t>(yy) * size + x];
      }
      out[static_cast<std::size_t>(y) * size + x] = acc;
    }
  }
  return out;
}

void gaussian_blur(Patch& patch, double sigma) {
  if (gaussian_kernel(sigma).size() == 1) return;
  const int s = patch.size;
  const std::size_t n = static_cast<std::size_t>(s) * s;
  std::vector<double> plane(n);
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < n; ++i) plane[i] = patch.pixels[i * 3 + c];
    const auto blurred = gaussian_blur_plane(plane, s, sigma);
    for (std::size_t i = 0; i < n; ++i) patch.pixels[i * 3 + c] = to_byte(blurred[i]);
  }
}

bool rotate_patch(Patch& patch, BBox& box, double degrees) {
  const int s = patch.size;
  const Point pivot{0.5 * s, 0.5 * s};
  const BBox rotated = clip_to(rotate_enclosing(box, pivot, degrees), s, s);
  if (!(rotated.w > 0.0 && rotated.h > 0.0)) return false;

  std::array<std::uint64_t, 3> sum{0, 0, 0};
  std::size_t n_valid = 0;
  for (std::size_t i = 0; i < patch.validity.size(); ++i) {
    if (patch.validity[i] == 0) continue;
    for (int c = 0; c < 3; ++c) sum[c] += patch.pixels[i * 3 + c];
    ++n_valid;
  }
  std::array<std::uint8_t, 3> fill{0, 0, 0};
  if (n_valid > 0) {
    for (int c = 0; c < 3; ++c) fill[c] = static_cast<std::uint8_t>((sum[c] + n_valid / 2) / n_valid);
  }

  const double rad = degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(rad);
  const double sn = std::sin(rad);
  Patch out = patch;
  for (int y = 0; y < s; ++y) {
    for (int x = 0; x < s; ++x) {
      // Inverse rotation of the output pixel centre.
      const double dx = x + 0.5 - pivot.x;
      const double dy = y + 0.5 - pivot.y;
      const double sx = pivot.x + cs * dx + sn * dy;
      const double sy = pivot.y - sn * dx + cs * dy;
      const std::size_t idx = static_cast<std::size_t>(y) * s + x;
      const bool inside = sx >= 0.0 && sx < s && sy >= 0.0 && sy < s;
      const int nx = std::clamp(static_cast<int>(sx), 0, s - 1);
      const int ny = std::clamp(static_cast<int>(sy), 0, s - 1);
      if (!inside || !patch.valid(nx, ny)) {
        out.validity[idx] = 0;
        for (int c = 0; c < 3; ++c) out.pixels[idx * 3 + c] = fill[c];
        continue;
      }
      out.validity[idx] = 1;
      const double u = sx - 0.5;
      const double v = sy - 0.5;
      const double fu = std::floor(u);
      const double fv = std::floor(v);
      const double ax = u - fu;
      const double ay = v - fv;
      const int x0 = std::clamp(static_cast<int>(fu), 0, s - 1);
      const int x1 = std::clamp(static_cast<int>(fu) + 1, 0, s - 1);
      const int y0 = std::clamp(static_cast<int>(fv), 0, s - 1);
      const int y1 = std::clamp(static_cast<int>(fv) + 1, 0, s - 1);
      for (int c = 0; c < 3; ++c) {
        const double top = patch.at(x0, y0, c) * (1.0 - ax) + patch.at(x1, y0, c) * ax;
        const double bot = patch.at(x0, y1, c) * (1.0 - ax) + patch.at(x1, y1, c) * ax;
        out.pixels[idx * 3 + c] = to_byte(top * (1.0 - ay) + bot * ay);
      }
    }
  }
  patch = std::move(out);
  box = rotated;
  return true;
}

bool grayscale(Patch& patch, double p, RandomSource& rng) {
  if (!rng.bernoulli(p)) return false;
  to_grayscale(patch);
  return true;
}

bool horizontal_flip(Patch& patch, BBox& box, double p, RandomSource& rng) {
  if (!rng.bernoulli(p)) return false;
  flip_horizontal(patch, box);
  return true;
}

std::optional<double> brightness_jitter(Patch& patch, double p, double magnitude, RandomSource& rng) {
  if (!rng.bernoulli(p)) return std::nullopt;
  const double f = rng.uniform(1.0 - magnitude, 1.0 + magnitude);
  if (f != 1.0) scale_brightness(patch, f);
  return f;
}

std::optional<double> blur(Patch& patch, double p, double sigma_min, double sigma_max, RandomSource& rng) {
  if (!rng.bernoulli(p)) return std::nullopt;
  const double sigma = rng.uniform(sigma_min, sigma_max);
  gaussian_blur(patch, sigma);
  return sigma;
}

std::optional<double> rotate(Patch& patch, BBox& box, double p, double max_deg, RandomSource& rng) {
  if (!rng.bernoulli(p)) return std::nullopt;
  const double deg = rng.uniform(-max_deg, max_deg);
  if (deg == 0.0 || !rotate_patch(patch, box, deg)) return std::nullopt;
  return deg;
}

GdaRecord apply_gda(Patch& patch, BBox& box, const GdaConfig& cfg, RandomSource& rng) {
  GdaRecord rec;
  rec.gray = grayscale(patch, cfg.p_gray, rng);
  rec.flip = horizontal_flip(patch, box, cfg.p_flip, rng);
  rec.brightness = brightness_jitter(patch, cfg.p_brightness, cfg.brightness_magnitude, rng);
  rec.blur_sigma = blur(patch, cfg.p_blur, cfg.blur_sigma_min, cfg.blur_sigma_max, rng);
  rec.rotate_deg = rotate(patch, box, cfg.p_rotate, cfg.rotate_max_deg, rng);
  return rec;
}

}  // namespace trackaug
