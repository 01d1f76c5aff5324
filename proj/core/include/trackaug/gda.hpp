// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "trackaug/image.hpp"

namespace trackaug {

/// General augmentation stack. Magnitude defaults are placeholders chosen for
/// this library; every field is configurable.
struct GdaConfig {
  double p_gray = 0.5;
  double p_flip = 0.5;
  double p_brightness = 0.5;
  double p_blur = 0.05;
  double p_rotate = 0.05;
  double brightness_magnitude = 0.2;
  double blur_sigma_min = 0.5;
  double blur_sigma_max = 2.0;
  double rotate_max_deg = 10.0;

  void validate() const;
  static GdaConfig disabled();

  friend bool operator==(const GdaConfig&, const GdaConfig&) = default;
};

/// What the gated stack actually did to one patch.
struct GdaRecord {
  bool gray = false;
  bool flip = false;
  std::optional<double> brightness;  // factor
  std::optional<double> blur_sigma;
  std::optional<double> rotate_deg;

  friend bool operator==(const GdaRecord&, const GdaRecord&) = default;
};

// Deterministic kernels.

/// Luma (299 R + 587 G + 114 B) / 1000, rounded, written to all channels.
void to_grayscale(Patch& patch);
void flip_horizontal(Patch& patch, BBox& box);
void scale_brightness(Patch& patch, double factor);
/// Normalized 1-D Gaussian of radius ceil(3 sigma); {1} when sigma < 0.3.
std::vector<double> gaussian_kernel(double sigma);
/// Separable blur with edge clamping. Validity is left untouched.
void gaussian_blur(Patch& patch, double sigma);
/// Separable blur of a single float plane (no rounding).
std::vector<double> gaussian_blur_plane(const std::vector<double>& plane, int size, double sigma);
/// Rotates content about the patch centre; exposed corners become invalid and
/// take the per-channel mean of valid pixels. `box` becomes the clipped
/// enclosing box of its rotated corners. Returns false, leaving both inputs
/// unchanged, when the clipped box would be degenerate.
bool rotate_patch(Patch& patch, BBox& box, double degrees);

// Probability-gated transforms. A zero probability draws nothing and leaves the
// input bit-identical.

bool grayscale(Patch& patch, double p, RandomSource& rng);
bool horizontal_flip(Patch& patch, BBox& box, double p, RandomSource& rng);
std::optional<double> brightness_jitter(Patch& patch, double p, double magnitude, RandomSource& rng);
std::optional<double> blur(Patch& patch, double p, double sigma_min, double sigma_max, RandomSource& rng);
std::optional<double> rotate(Patch& patch, BBox& box, double p, double max_deg, RandomSource& rng);

/// Gray, flip, brightness, blur, rotate, in that order.
GdaRecord apply_gda(Patch& patch, BBox& box, const GdaConfig& cfg, RandomSource& rng);

}  // namespace trackaug
