// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "trackaug/analysis.hpp"
#include "trackaug/error.hpp"

namespace trackaug {
namespace {

TEST(Histogram, BinsAndClampsToEdges) {
  Histogram h(0.0, 1.0, 4);
  for (double v : {-1.0, 0.1, 0.3, 0.3, 0.99, 2.0}) h.add(v);
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{2, 2, 0, 2}));
  EXPECT_EQ(h.total(), 6u);
  EXPECT_DOUBLE_EQ(h.mass()[1], 2.0 / 6.0);
}

TEST(SyntheticTarget, StaysInsideTheVirtualFrame) {
  for (std::uint64_t i = 0; i < 10000; ++i) {
    RngStream r = rng_for(1, "synthetic", 0, i, "target");
    const BBox b = synthetic_target(r);
    ASSERT_GE(b.x, 0.0);
    ASSERT_GE(b.y, 0.0);
    ASSERT_LE(b.right(), 1920.0 + 1e-9);
    ASSERT_LE(b.bottom(), 1080.0 + 1e-9);
    const double area = b.w * b.h / (1920.0 * 1080.0);
    ASSERT_GE(area, 1e-3 * (1 - 1e-9));
    ASSERT_LE(area, 0.1 * (1 + 1e-9));
  }
}

TEST(CropStats, WorkerCountDoesNotChangeTheReport) {
  const CropperSpec spec = CropperSpec::orc(AugPolicy{});
  const StatsReport a = run_crop_stats(spec, 20000, 5, 1);
  const StatsReport b = run_crop_stats(spec, 20000, 5, 8);
  EXPECT_EQ(format_report(a), format_report(b));
}

TEST(CropStats, OrcNeverLosesTheCentreAndHitsBoundaryRate) {
  AugPolicy p;
  p.p_boundary = 0.2;
  const StatsReport r = run_crop_stats(CropperSpec::orc(p), 50000, 6, 4);
  EXPECT_EQ(r.uninformative_rate, 0.0);
  EXPECT_NEAR(r.boundary_rate, 0.2, 5 * std::sqrt(0.2 * 0.8 / 50000));
  EXPECT_GE(r.gamma_min, p.gamma_min);
  EXPECT_LE(r.gamma_max, p.gamma_max);
  EXPECT_GT(r.gamma_variance, 0.0);
  EXPECT_EQ(r.gamma_histogram.total(), 50000u);
}

TEST(CropStats, LegacyFactorIsConstant) {
  const StatsReport r = run_crop_stats(CropperSpec::legacy(4.0, {3.0, 0.25}), 10000, 7, 2);
  EXPECT_EQ(r.gamma_variance, 0.0);
  EXPECT_EQ(r.gamma_min, 4.0);
  EXPECT_EQ(r.gamma_max, 4.0);
  EXPECT_EQ(r.boundary_rate, 0.0);
}

TEST(Sweep, CellsAreShiftMajorAndLegacyRateGrowsWithShift) {
  const SweepReport r = run_jitter_sweep(kSweepShifts, kSweepScales, CropperSpec::legacy(4.0, {}), 20000, 8, 4);
  ASSERT_EQ(r.cells.size(), 16u);
  EXPECT_EQ(r.cells[4].shift, kSweepShifts[1]);
  EXPECT_EQ(r.cells[5].scale, kSweepScales[1]);
  for (std::size_t s = 1; s < 4; ++s)
    EXPECT_GE(r.cells[s * 4].report.uninformative_rate, r.cells[(s - 1) * 4].report.uninformative_rate);
  const std::string csv = sweep_csv(r);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 17);
  EXPECT_EQ(csv.rfind("cropper,shift,scale,n,", 0), 0u);
}

TEST(MixStats, ResidualsAreTiny) {
  const MixStatsReport r = run_mix_stats(TfmixConfig{}, 2000, 9, 4);
  EXPECT_EQ(r.n_mixes, 2000u);
  EXPECT_LT(r.max_mean_residual, 1e-6);
  EXPECT_LT(r.max_std_residual, 1e-6);
  EXPECT_LE(r.max_accepted_occlusion, 0.5);
}

TEST(Report, TextListsKeysOnePerLine) {
  const StatsReport r = run_crop_stats(CropperSpec::orc(AugPolicy{}), 1000, 1, 1);
  const std::string text = format_report(r);
  for (const char* key : {"n_samples: 1000", "uninformative_rate: ", "boundary_rate: ", "gamma_variance: ",
                          "gamma_histogram[0]: "})
    EXPECT_NE(text.find(key), std::string::npos) << key;
}

}  // namespace
}  // namespace trackaug
