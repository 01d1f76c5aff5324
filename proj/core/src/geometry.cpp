// SPDX-License-Identifier: Apache-2.0

#include "trackaug/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "trackaug/error.hpp"

namespace trackaug {

double BBox::scale() const noexcept { return std::sqrt(w * h); }

bool is_valid(const BBox& b) noexcept {
  return std::isfinite(b.x) && std::isfinite(b.y) && std::isfinite(b.w) &&
         std::isfinite(b.h) && b.w > 0.0 && b.h > 0.0;
}

void validate(const BBox& b, std::string_view what) {
  if (!is_valid(b)) {
    fail(ErrorCode::kInvalidArgument,
         std::string(what) + ": box must be finite with w > 0 and h > 0");
  }
}

std::string_view to_string(CropKind kind) noexcept {
  switch (kind) {
    case CropKind::kNormal: return "normal";
    case CropKind::kBoundary: return "boundary";
    case CropKind::kLegacy: return "legacy";
    case CropKind::kTemplate: return "template";
  }
  return "normal";
}

CropKind crop_kind_from_string(std::string_view s) {
  if (s == "normal") return CropKind::kNormal;
  if (s == "boundary") return CropKind::kBoundary;
  if (s == "legacy") return CropKind::kLegacy;
  if (s == "template") return CropKind::kTemplate;
  fail(ErrorCode::kParse, "unknown crop kind '" + std::string(s) + "'");
}

std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::kTop: return "top";
    case Direction::kBottom: return "bottom";
    case Direction::kLeft: return "left";
    case Direction::kRight: return "right";
  }
  return "top";
}

CropWindow center_crop(const BBox& b, double gamma) {
  validate(b, "center_crop");
  require(std::isfinite(gamma) && gamma > 0.0, "center_crop: gamma must be finite and > 0");
  const double side = gamma * b.scale();
  const Point c = b.center();
  return CropWindow{{c.x - 0.5 * side, c.y - 0.5 * side, side, side}, gamma, CropKind::kNormal};
}

BBox jitter(const BBox& b, const JitterParams& params, RandomSource& rng) {
  validate(b, "jitter");
  require(std::isfinite(params.shift) && params.shift >= 0.0 &&
              std::isfinite(params.scale) && params.scale >= 0.0,
          "jitter: shift and scale factors must be finite and >= 0");
  const double w = b.w * std::exp(rng.uniform(-params.scale, params.scale));
  const double h = b.h * std::exp(rng.uniform(-params.scale, params.scale));
  const double reach = 0.5 * params.shift * std::sqrt(w * h);
  const Point c = b.center();
  const double cx = c.x + rng.uniform(-reach, reach);
  const double cy = c.y + rng.uniform(-reach, reach);
  if (w == b.w && h == b.h && cx == c.x && cy == c.y) return b;
  return BBox{cx - 0.5 * w, cy - 0.5 * h, w, h};
}

double practical_min_gamma(const BBox& truth, const BBox& jittered, double gamma_min) {
  validate(truth, "practical_min_gamma(truth)");
  validate(jittered, "practical_min_gamma(jittered)");
  require(std::isfinite(gamma_min) && gamma_min > 0.0,
          "practical_min_gamma: gamma_min must be finite and > 0");
  const Point a = truth.center();
  const Point b = jittered.center();
  const double disp = std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
  return std::max(2.0 * disp / jittered.scale(), gamma_min);
}

namespace {

struct Axis {
  double crop_lo;    // crop coordinate along the moving axis
  double target_lo;  // target start along the moving axis
  double target_len;
  double perp_crop_lo;
  double perp_target_lo;
  double perp_target_len;
};

Axis axis_for(const CropWindow& crop, const BBox& t, Direction d) {
  const bool horizontal = d == Direction::kLeft || d == Direction::kRight;
  if (horizontal) return {crop.box.x, t.x, t.w, crop.box.y, t.y, t.h};
  return {crop.box.y, t.y, t.h, crop.box.x, t.x, t.w};
}

}  // namespace

ShiftRange boundary_shift_range(const CropWindow& crop, const BBox& target,
                                Direction direction, double v_min) {
  validate(crop.box, "shift_to_boundary(crop)");
  validate(target, "shift_to_boundary(target)");
  require(v_min > 0.0 && v_min < 1.0, "shift_to_boundary: v_min must lie in (0, 1)");
  const double side = crop.side();
  const Axis a = axis_for(crop, target, direction);

  // The target must stay inside the crop across the other axis, otherwise it
  // would cut more than the requested edge.
  if (a.perp_crop_lo > a.perp_target_lo ||
      a.perp_crop_lo + side < a.perp_target_lo + a.perp_target_len) {
    fail(ErrorCode::kInfeasibleBoundary,
         "shift_to_boundary: target does not fit across the " +
             std::string(to_string(direction)) + " edge");
  }

  const double t_end = a.target_lo + a.target_len;
  ShiftRange r;
  const bool leading = direction == Direction::kLeft || direction == Direction::kTop;
  if (leading) {
    // Crop start strictly past the target start, leaving >= v_min visible,
    // while the crop end still covers the target end.
    r.hi = a.target_lo + (1.0 - v_min) * a.target_len;
    if (t_end - side > a.target_lo) {
      r.lo = t_end - side;
    } else {
      r.lo = a.target_lo;
      r.lo_open = true;
    }
  } else {
    // Crop end strictly before the target end, leaving >= v_min visible,
    // while the crop start still covers the target start.
    r.lo = a.target_lo + v_min * a.target_len - side;
    if (t_end - side < a.target_lo) {
      r.hi = t_end - side;
      r.hi_open = true;
    } else {
      r.hi = a.target_lo;
    }
  }
  const bool empty = (r.lo_open || r.hi_open) ? !(r.lo < r.hi) : !(r.lo <= r.hi);
  if (empty) {
    fail(ErrorCode::kInfeasibleBoundary,
         "shift_to_boundary: no placement keeps the visible fraction in [v_min, 1)");
  }
  return r;
}

CropWindow shift_to_boundary(const CropWindow& crop, const BBox& target,
                             Direction direction, double v_min, RandomSource& rng) {
  const ShiftRange r = boundary_shift_range(crop, target, direction, v_min);
  const double u = rng.next_unit();
  double pos = r.lo_open ? r.hi - u * (r.hi - r.lo) : r.lo + u * (r.hi - r.lo);

  CropWindow out = crop;
  out.kind = CropKind::kBoundary;
  const bool horizontal = direction == Direction::kLeft || direction == Direction::kRight;
  auto place = [&](double p) {
    if (horizontal) {
      out.box.x = p;
    } else {
      out.box.y = p;
    }
  };
  place(pos);
  // Rounding at the closed end can leave the fraction a few ulps short of
  // v_min; step inward until the contract holds.
  const double inward = r.lo_open ? r.lo : r.hi;
  for (int i = 0; i < 64 && visible_fraction(target, out.box) < v_min; ++i) {
    pos = std::nextafter(pos, inward);
    place(pos);
  }
  return out;
}

double intersection_area(const BBox& a, const BBox& b) noexcept {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

double visible_fraction(const BBox& target, const BBox& window) noexcept {
  return intersection_area(target, window) / target.area();
}

bool contains(const BBox& window, const Point& p, double rel_tol) noexcept {
  const double slack = rel_tol * std::max(window.w, window.h);
  return p.x >= window.x - slack && p.x <= window.right() + slack &&
         p.y >= window.y - slack && p.y <= window.bottom() + slack;
}

unsigned crossed_edges(const BBox& t, const BBox& w) noexcept {
  const bool overlap_x = t.x < w.right() && t.right() > w.x;
  const bool overlap_y = t.y < w.bottom() && t.bottom() > w.y;
  if (!overlap_x || !overlap_y) return 0u;
  unsigned mask = 0u;
  if (t.y < w.y) mask |= kEdgeTop;
  if (t.bottom() > w.bottom()) mask |= kEdgeBottom;
  if (t.x < w.x) mask |= kEdgeLeft;
  if (t.right() > w.right()) mask |= kEdgeRight;
  return mask;
}

unsigned edge_bit(Direction d) noexcept {
  switch (d) {
    case Direction::kTop: return kEdgeTop;
    case Direction::kBottom: return kEdgeBottom;
    case Direction::kLeft: return kEdgeLeft;
    case Direction::kRight: return kEdgeRight;
  }
  return 0u;
}

BBox rotate_enclosing(const BBox& b, const Point& pivot, double degrees) noexcept {
  const double rad = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  const std::array<Point, 4> corners{{{b.x, b.y}, {b.right(), b.y}, {b.x, b.bottom()}, {b.right(), b.bottom()}}};
  double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
  for (const Point& p : corners) {
    const double dx = p.x - pivot.x;
    const double dy = p.y - pivot.y;
    const double rx = pivot.x + c * dx - s * dy;
    const double ry = pivot.y + s * dx + c * dy;
    x0 = std::min(x0, rx);
    y0 = std::min(y0, ry);
    x1 = std::max(x1, rx);
    y1 = std::max(y1, ry);
  }
  return {x0, y0, x1 - x0, y1 - y0};
}

BBox clip_to(const BBox& b, double width, double height) noexcept {
  const double x0 = std::max(b.x, 0.0);
  const double y0 = std::max(b.y, 0.0);
  const double x1 = std::min(b.right(), width);
  const double y1 = std::min(b.bottom(), height);
  return {x0, y0, x1 - x0, y1 - y0};
}

}  // namespace trackaug
