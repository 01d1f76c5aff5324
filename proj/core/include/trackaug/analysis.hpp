// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trackaug/cropping.hpp"
#include "trackaug/mixing.hpp"

namespace trackaug {

/// Fixed-range histogram. Values outside [lo, hi) land in the edge bins.
struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::uint64_t> counts;

  Histogram() = default;
  Histogram(double lo, double hi, int bins);

  void add(double v);
  std::uint64_t total() const noexcept;
  /// Normalized bin masses; all zero when empty.
  std::vector<double> mass() const;
};

struct StatsReport {
  std::uint64_t n_samples = 0;
  double uninformative_rate = 0.0;  // target centre outside a non-boundary crop
  double boundary_rate = 0.0;
  double fallback_rate = 0.0;
  double mean_retries = 0.0;
  double gamma_mean = 0.0;
  double gamma_variance = 0.0;  // unbiased sample variance
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  /// sqrt(w * h) of the target divided by the crop side.
  double scale_min = 0.0;
  double scale_max = 0.0;
  Histogram gamma_histogram{0.0, 8.0, 32};
  Histogram target_scale_histogram{0.0, 1.0, 40};
  /// Per-axis max |target centre - crop centre| divided by the crop side;
  /// values above 0.5 mean the centre left the crop.
  Histogram center_offset_histogram{0.0, 1.0, 40};
};

struct CropperSpec {
  enum class Kind { kOrc, kLegacy };
  Kind kind = Kind::kOrc;
  AugPolicy policy;        // ORC parameters and jitter
  double gamma_fix = 4.0;  // legacy only; legacy uses policy.jitter

  static CropperSpec orc(const AugPolicy& policy);
  static CropperSpec legacy(double gamma_fix, const JitterParams& jitter);
};

/// Random target with aspect and area fraction log-uniform in [1/3, 3] and
/// [0.1%, 10%] of a 1920x1080 frame, placed uniformly inside the frame.
BBox synthetic_target(RandomSource& rng);

/// Monte-Carlo over `n` synthetic targets. Sample i draws its target and its
/// crop from streams keyed only by (seed, i), so different croppers see the
/// same targets and the same uniforms. Independent of `workers`.
StatsReport run_crop_stats(const CropperSpec& cropper, std::uint64_t n, std::uint64_t seed, int workers = 1);

struct SweepCell {
  double shift = 0.0;
  double scale = 0.0;
  StatsReport report;
};

struct SweepReport {
  std::string cropper;  // "orc" or "legacy"
  std::vector<SweepCell> cells;  // shift-major
};

/// Re-runs run_crop_stats with every (shift, scale) jitter pair.
SweepReport run_jitter_sweep(const std::vector<double>& shifts, const std::vector<double>& scales,
                             const CropperSpec& cropper, std::uint64_t n, std::uint64_t seed, int workers = 1);

inline const std::vector<double> kSweepShifts = {2.0, 3.0, 4.0, 5.0};
inline const std::vector<double> kSweepScales = {0.15, 0.25, 0.35, 0.45};

struct MixStatsReport {
  std::uint64_t n_mixes = 0;
  /// max |mean(replaced) - mean_s| / max(|mean_s|, std_s)
  double max_mean_residual = 0.0;
  /// max |std(replaced) - std_s| / std_s
  double max_std_residual = 0.0;
  std::uint64_t fallbacks = 0;
  double max_accepted_occlusion = 0.0;
  Histogram occlusion_histogram{0.0, 1.0, 20};
};

/// Runs tfmix on `n` random synthetic token grids (16 x 16 cells, `dim`
/// features) with random object boxes, and measures how well the replaced
/// tokens reproduce the search-object moments.
MixStatsReport run_mix_stats(const TfmixConfig& cfg, std::uint64_t n, std::uint64_t seed, int workers = 1,
                             int dim = 32);

/// Line-oriented "key: value" text; histograms as "name[i]: lo hi mass".
std::string format_report(const StatsReport& r);
std::string format_report(const MixStatsReport& r);
std::string format_report(const SweepReport& r);
/// Comma-separated table, one row per cell, with a header.
std::string sweep_csv(const SweepReport& r);

}  // namespace trackaug
