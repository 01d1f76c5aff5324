// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

#include "trackaug/rng.hpp"

namespace trackaug {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned box in pixel coordinates (left, top, width, height). May
/// extend past the image; only width/height positivity is required.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const noexcept { return x + w; }
  double bottom() const noexcept { return y + h; }
  Point center() const noexcept { return {x + 0.5 * w, y + 0.5 * h}; }
  double area() const noexcept { return w * h; }
  /// Geometric-mean side, sqrt(w * h).
  double scale() const noexcept;

  friend bool operator==(const BBox&, const BBox&) = default;
};

bool is_valid(const BBox& b) noexcept;
/// Throws kInvalidArgument naming `what` when `b` is not a valid box.
void validate(const BBox& b, std::string_view what);

/// Shift (D) and log-scale (S) jitter magnitudes.
struct JitterParams {
  double shift = 0.0;
  double scale = 0.0;

  friend bool operator==(const JitterParams&, const JitterParams&) = default;
};

enum class CropKind : std::uint8_t { kNormal, kBoundary, kLegacy, kTemplate };
std::string_view to_string(CropKind kind) noexcept;
CropKind crop_kind_from_string(std::string_view s);

/// Crop edge that the target is pushed across by a boundary shift.
enum class Direction : std::uint8_t { kTop, kBottom, kLeft, kRight };
std::string_view to_string(Direction d) noexcept;

struct CropWindow {
  BBox box;  // square
  double gamma = 0.0;
  CropKind kind = CropKind::kNormal;

  double side() const noexcept { return box.w; }

  friend bool operator==(const CropWindow&, const CropWindow&) = default;
};

/// Square of side gamma * sqrt(w * h) centred on `b`.
CropWindow center_crop(const BBox& b, double gamma);

/// Log-uniform size jitter per axis, then a per-axis centre offset of
/// Uniform(-shift/2, shift/2) * sqrt(w' * h') measured on the jittered size.
/// Draw order: scale_w, scale_h, shift_x, shift_y.
BBox jitter(const BBox& b, const JitterParams& params, RandomSource& rng);

/// Smallest search factor for which a crop centred on `jittered` still holds
/// the centre of `truth`, floored at `gamma_min`. Uses the per-axis maximum
/// centre displacement, which is what square-crop containment needs.
double practical_min_gamma(const BBox& truth, const BBox& jittered, double gamma_min);

/// Range of the moved crop coordinate (x for left/right, y for top/bottom)
/// that satisfies the boundary contract. The range is half-open on the side
/// where the visible fraction would reach 1.
struct ShiftRange {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;
  bool hi_open = false;
};

/// Throws kInfeasibleBoundary when no placement exists.
ShiftRange boundary_shift_range(const CropWindow& crop, const BBox& target,
                                Direction direction, double v_min);

/// Moves `crop` so that `target` straddles the named crop edge with a
/// visible area fraction in [v_min, 1). The crop side and gamma are kept.
CropWindow shift_to_boundary(const CropWindow& crop, const BBox& target,
                             Direction direction, double v_min, RandomSource& rng);

double intersection_area(const BBox& a, const BBox& b) noexcept;
/// Fraction of `target` area inside `window`.
double visible_fraction(const BBox& target, const BBox& window) noexcept;

/// Closed containment with a relative slack of `rel_tol` * window side, which
/// absorbs the rounding of the centre/side arithmetic at exact contact.
bool contains(const BBox& window, const Point& p, double rel_tol = 1e-9) noexcept;

/// Bitmask of window edges that cut through `target` (target extends past the
/// edge while still overlapping the window).
enum EdgeMask : unsigned {
  kEdgeTop = 1u << 0,
  kEdgeBottom = 1u << 1,
  kEdgeLeft = 1u << 2,
  kEdgeRight = 1u << 3,
};
unsigned crossed_edges(const BBox& target, const BBox& window) noexcept;
unsigned edge_bit(Direction d) noexcept;

/// Axis-aligned box enclosing `b` rotated by `degrees` about `pivot`.
BBox rotate_enclosing(const BBox& b, const Point& pivot, double degrees) noexcept;

/// Intersection of `b` with [0, w) x [0, h); w/h may come out non-positive.
BBox clip_to(const BBox& b, double width, double height) noexcept;

}  // namespace trackaug
