// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "scripted.hpp"
#include "trackaug/error.hpp"
#include "trackaug/geometry.hpp"

namespace trackaug {
namespace {

TEST(CenterCrop, HandComputedWindows) {
  EXPECT_EQ(center_crop({40, 40, 20, 20}, 4).box, (BBox{10, 10, 80, 80}));
  EXPECT_EQ(center_crop({40, 40, 20, 20}, 1).box, (BBox{40, 40, 20, 20}));
  EXPECT_EQ(center_crop({0, 0, 9, 16}, 2).box, (BBox{-7.5, -4, 24, 24}));
  const CropWindow w = center_crop({0, 0, 9, 16}, 2);
  EXPECT_EQ(w.gamma, 2.0);
  EXPECT_EQ(w.kind, CropKind::kNormal);
}

TEST(CenterCrop, RejectsBadInput) {
  EXPECT_THROW(center_crop({0, 0, 0, 5}, 2), Error);
  EXPECT_THROW(center_crop({0, 0, 5, 5}, 0), Error);
  EXPECT_THROW(center_crop({0, 0, 5, 5}, std::nan("")), Error);
}

TEST(CenterCrop, SquareAndCentredForRandomBoxes) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.5, 400.0);
  for (int i = 0; i < 10000; ++i) {
    const BBox b{u(gen) - 200, u(gen) - 200, u(gen), u(gen)};
    const double g = u(gen) / 50;
    const BBox w = center_crop(b, g).box;
    const double side = g * std::sqrt(b.w * b.h);
    ASSERT_NEAR(w.w, side, 1e-6 * side);
    ASSERT_NEAR(w.h, side, 1e-6 * side);
    ASSERT_NEAR(w.center().x, b.center().x, 1e-6);
    ASSERT_NEAR(w.center().y, b.center().y, 1e-6);
  }
}

TEST(Jitter, ZeroJitterIsIdentity) {
  RngStream s(1);
  const BBox b{3, 4, 50, 20};
  EXPECT_EQ(jitter(b, {0, 0}, s), b);
}

TEST(Jitter, ScaleStaysWithinLogBounds) {
  RngStream s(2);
  for (int i = 0; i < 10000; ++i) {
    const BBox j = jitter({0, 0, 20, 20}, {0.0, std::log(2.0)}, s);
    ASSERT_GE(j.w, 10.0 - 1e-9);
    ASSERT_LE(j.w, 40.0 + 1e-9);
    ASSERT_GE(j.h, 10.0 - 1e-9);
    ASSERT_LE(j.h, 40.0 + 1e-9);
  }
}

TEST(Jitter, ShiftStaysWithinBound) {
  RngStream s(3);
  double max_off = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const BBox j = jitter({0, 0, 20, 20}, {3.0, 0.0}, s);
    const double ox = j.center().x - 10, oy = j.center().y - 10;
    ASSERT_LE(std::abs(ox), 60.0);
    ASSERT_LE(std::abs(oy), 60.0);
    max_off = std::max({max_off, std::abs(ox), std::abs(oy)});
  }
  // Half-width reach: 3 / 2 * 20.
  EXPECT_LE(max_off, 30.0);
  EXPECT_GT(max_off, 29.0);
}

TEST(Jitter, DrawOrderIsScaleThenShift) {
  // Centre draws leave the size alone; shift_x = 0.75 moves x by half the
  // reach of 0.5 * 2 * 20.
  testing_support::Scripted s({0.5, 0.5, 0.75, 0.5});
  const BBox j = jitter({0, 0, 20, 20}, {2.0, 0.5}, s);
  EXPECT_DOUBLE_EQ(j.w, 20.0);
  EXPECT_DOUBLE_EQ(j.h, 20.0);
  EXPECT_DOUBLE_EQ(j.center().x, 20.0);
  EXPECT_DOUBLE_EQ(j.center().y, 10.0);
}

TEST(PracticalMinGamma, HandComputedValues) {
  // ct_s = (100, 100), b_jit centre (112, 104) with side 40.
  EXPECT_DOUBLE_EQ(practical_min_gamma({80, 80, 40, 40}, {92, 84, 40, 40}, 2.0), 2.0);
  // b_jit centre (140, 100) with side 20.
  EXPECT_DOUBLE_EQ(practical_min_gamma({90, 90, 20, 20}, {130, 90, 20, 20}, 2.0), 4.0);
  EXPECT_EQ(practical_min_gamma({90, 90, 20, 20}, {90, 90, 20, 20}, 2.5), 2.5);
}

TEST(PracticalMinGamma, GuaranteesCentreContainment) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    const BBox gt{u(gen) * 500, u(gen) * 500, 5 + u(gen) * 100, 5 + u(gen) * 100};
    const BBox jit{gt.x + (u(gen) - 0.5) * 300, gt.y + (u(gen) - 0.5) * 300, 5 + u(gen) * 100, 5 + u(gen) * 100};
    const double g0 = practical_min_gamma(gt, jit, 0.5 + u(gen) * 3);
    const double g = g0 * (1.0 + u(gen));
    const BBox w = center_crop(jit, g0).box;
    const BBox w2 = center_crop(jit, g).box;
    ASSERT_TRUE(contains(w, gt.center())) << i;
    ASSERT_TRUE(contains(w2, gt.center())) << i;
  }
}

TEST(Boundary, LeftShiftRangeMatchesIntervalArithmetic) {
  const CropWindow crop{{10, 10, 80, 80}, 4.0, CropKind::kNormal};
  const ShiftRange r = boundary_shift_range(crop, {45, 45, 10, 10}, Direction::kLeft, 0.3);
  EXPECT_DOUBLE_EQ(r.lo, 45.0);
  EXPECT_DOUBLE_EQ(r.hi, 52.0);
  EXPECT_TRUE(r.lo_open);
  EXPECT_FALSE(r.hi_open);
}

TEST(Boundary, ForcedDrawGivesHalfVisible) {
  const CropWindow crop{{10, 10, 80, 80}, 4.0, CropKind::kNormal};
  testing_support::Scripted s({2.0 / 7.0});
  const CropWindow w = shift_to_boundary(crop, {45, 45, 10, 10}, Direction::kLeft, 0.3, s);
  EXPECT_NEAR(w.box.x, 50.0, 1e-12);
  EXPECT_NEAR(visible_fraction({45, 45, 10, 10}, w.box), 0.5, 1e-12);
  EXPECT_EQ(w.kind, CropKind::kBoundary);
  EXPECT_EQ(w.box.w, 80.0);
  EXPECT_EQ(w.gamma, 4.0);
}

TEST(Boundary, VMinOfOneIsRejected) {
  const CropWindow crop{{10, 10, 80, 80}, 4.0, CropKind::kNormal};
  RngStream s(1);
  EXPECT_THROW(shift_to_boundary(crop, {45, 45, 10, 10}, Direction::kLeft, 1.0, s), Error);
}

TEST(Boundary, TargetWiderThanCropIsInfeasible) {
  const CropWindow crop{{0, 0, 20, 20}, 1.0, CropKind::kNormal};
  RngStream s(1);
  try {
    shift_to_boundary(crop, {-5, 5, 30, 10}, Direction::kTop, 0.3, s);
    FAIL() << "expected kInfeasibleBoundary";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasibleBoundary);
  }
}

TEST(Boundary, RandomPlacementsCrossExactlyTheRequestedEdge) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Direction dirs[] = {Direction::kTop, Direction::kBottom, Direction::kLeft, Direction::kRight};
  RngStream s(6);
  int infeasible = 0;
  for (int i = 0; i < 20000; ++i) {
    const BBox t{u(gen) * 300, u(gen) * 300, 5 + u(gen) * 60, 5 + u(gen) * 60};
    const CropWindow crop = center_crop(t, 2 + 4 * u(gen));
    const Direction d = dirs[i % 4];
    const double v_min = 0.05 + 0.9 * u(gen);
    // Elongated targets can be longer than the crop and have no placement.
    CropWindow w;
    try {
      w = shift_to_boundary(crop, t, d, v_min, s);
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::kInfeasibleBoundary);
      ++infeasible;
      continue;
    }
    ASSERT_EQ(crossed_edges(t, w.box), edge_bit(d)) << i;
    const double v = visible_fraction(t, w.box);
    ASSERT_GE(v, v_min * (1 - 1e-12)) << i;
    ASSERT_LT(v, 1.0) << i;
  }
  EXPECT_LT(infeasible, 2000);
}

TEST(Geometry, RotateEnclosingAndClip) {
  const BBox r = rotate_enclosing({0, 0, 10, 10}, {5, 5}, 90.0);
  EXPECT_NEAR(r.x, 0.0, 1e-9);
  EXPECT_NEAR(r.y, 0.0, 1e-9);
  EXPECT_NEAR(r.w, 10.0, 1e-9);
  EXPECT_NEAR(r.h, 10.0, 1e-9);
  const BBox d = rotate_enclosing({123, 123, 10, 10}, {128, 128}, 45.0);
  EXPECT_NEAR(d.w, 10 * std::sqrt(2.0), 1e-9);
  EXPECT_EQ(clip_to({-5, -5, 20, 20}, 10, 10), (BBox{0, 0, 10, 10}));
}

}  // namespace
}  // namespace trackaug
