// SPDX-License-Identifier: Apache-2.0

#include "trackaug/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "trackaug/error.hpp"
#include "trackaug/pipeline.hpp"

namespace trackaug {

Histogram::Histogram(double lo_, double hi_, int bins) : lo(lo_), hi(hi_), counts(static_cast<std::size_t>(bins), 0) {
  require(bins >= 1 && hi_ > lo_, "histogram: need bins >= 1 and hi > lo");
}

void Histogram::add(double v) {
  const auto n = static_cast<std::ptrdiff_t>(counts.size());
  auto i = static_cast<std::ptrdiff_t>(std::floor((v - lo) / (hi - lo) * static_cast<double>(n)));
  if (!(v == v)) i = 0;
  counts[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, n - 1))] += 1;
}

std::uint64_t Histogram::total() const noexcept {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::vector<double> Histogram::mass() const {
  std::vector<double> m(counts.size(), 0.0);
  const auto t = total();
  if (t == 0) return m;
  for (std::size_t i = 0; i < counts.size(); ++i) m[i] = static_cast<double>(counts[i]) / static_cast<double>(t);
  return m;
}

CropperSpec CropperSpec::orc(const AugPolicy& policy) {
  CropperSpec c;
  c.kind = Kind::kOrc;
  c.policy = policy;
  return c;
}

CropperSpec CropperSpec::legacy(double gamma_fix, const JitterParams& jitter) {
  CropperSpec c;
  c.kind = Kind::kLegacy;
  c.gamma_fix = gamma_fix;
  c.policy.jitter = jitter;
  return c;
}

BBox synthetic_target(RandomSource& rng) {
  constexpr double kW = 1920.0;
  constexpr double kH = 1080.0;
  const double area = kW * kH * std::exp(rng.uniform(std::log(1e-3), std::log(0.1)));
  const double aspect = std::exp(rng.uniform(std::log(1.0 / 3.0), std::log(3.0)));
  const double w = std::sqrt(area * aspect);
  const double h = std::sqrt(area / aspect);
  const double x = rng.uniform(0.0, kW - w);
  const double y = rng.uniform(0.0, kH - h);
  return {x, y, w, h};
}

namespace {

struct CropSample {
  double gamma = 0.0;
  double scale = 0.0;
  double offset = 0.0;
  bool boundary = false;
  bool uninformative = false;
  bool fallback = false;
  int retries = 0;
};

CropSample crop_one(const CropperSpec& spec, std::uint64_t seed, std::uint64_t i) {
  RngStream target_rng = rng_for(seed, "synthetic", 0, i, "target");
  RngStream crop_rng = rng_for(seed, "synthetic", 0, i, "crop");
  const BBox target = synthetic_target(target_rng);
  const CropOutcome o = spec.kind == CropperSpec::Kind::kOrc
                            ? orc_sample(target, spec.policy, crop_rng)
                            : legacy_sample(target, spec.gamma_fix, spec.policy.jitter, crop_rng);
  const BBox& win = o.window.box;
  const Point tc = target.center();
  const Point wc = win.center();
  CropSample s;
  s.gamma = o.gamma;
  s.scale = target.scale() / win.w;
  s.offset = std::max(std::abs(tc.x - wc.x), std::abs(tc.y - wc.y)) / win.w;
  s.boundary = o.kind == CropKind::kBoundary;
  s.uninformative = !s.boundary && !contains(win, tc);
  s.retries = o.retries_used;
  s.fallback = spec.kind == CropperSpec::Kind::kOrc && !s.boundary && o.retries_used >= spec.policy.max_retries;
  return s;
}

}  // namespace

StatsReport run_crop_stats(const CropperSpec& cropper, std::uint64_t n, std::uint64_t seed, int workers) {
  if (cropper.kind == CropperSpec::Kind::kOrc) cropper.policy.validate();
  std::vector<CropSample> samples(n);
  parallel_for(n, workers, [&](std::size_t i) { samples[i] = crop_one(cropper, seed, i); });

  StatsReport r;
  r.n_samples = n;
  if (n == 0) return r;
  std::uint64_t uninformative = 0, boundary = 0, fallback = 0, retries = 0;
  double sum = 0.0;
  r.gamma_min = r.scale_min = std::numeric_limits<double>::infinity();
  r.gamma_max = r.scale_max = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    uninformative += s.uninformative;
    boundary += s.boundary;
    fallback += s.fallback;
    retries += static_cast<std::uint64_t>(s.retries);
    sum += s.gamma;
    r.gamma_min = std::min(r.gamma_min, s.gamma);
    r.gamma_max = std::max(r.gamma_max, s.gamma);
    r.scale_min = std::min(r.scale_min, s.scale);
    r.scale_max = std::max(r.scale_max, s.scale);
    r.gamma_histogram.add(s.gamma);
    r.target_scale_histogram.add(s.scale);
    r.center_offset_histogram.add(s.offset);
  }
  const auto nd = static_cast<double>(n);
  r.uninformative_rate = static_cast<double>(uninformative) / nd;
  r.boundary_rate = static_cast<double>(boundary) / nd;
  r.fallback_rate = static_cast<double>(fallback) / nd;
  r.mean_retries = static_cast<double>(retries) / nd;
  r.gamma_mean = sum / nd;
  if (n > 1) {
    double ss = 0.0;
    for (const auto& s : samples) ss += (s.gamma - r.gamma_mean) * (s.gamma - r.gamma_mean);
    r.gamma_variance = ss / (nd - 1.0);
  }
  return r;
}

SweepReport run_jitter_sweep(const std::vector<double>& shifts, const std::vector<double>& scales,
                             const CropperSpec& cropper, std::uint64_t n, std::uint64_t seed, int workers) {
  SweepReport out;
  out.cropper = cropper.kind == CropperSpec::Kind::kOrc ? "orc" : "legacy";
  for (double d : shifts) {
    for (double s : scales) {
      CropperSpec c = cropper;
      c.policy.jitter = {d, s};
      out.cells.push_back({d, s, run_crop_stats(c, n, seed, workers)});
    }
  }
  return out;
}

namespace {

constexpr int kMixGrid = 16;
constexpr int kMixPatch = 16;

TokenGrid random_grid(int dim, RandomSource& rng) {
  TokenGrid g(kMixGrid, kMixGrid, dim, kMixPatch);
  const double mean = rng.uniform(-50.0, 200.0);
  const double spread = std::exp(rng.uniform(std::log(0.01), std::log(80.0)));
  for (double& v : g.values) v = mean + spread * (rng.next_unit() - 0.5);
  return g;
}

/// Box in patch pixels, 1.5 to 8 cells per side so the mask is never empty.
BBox random_object(RandomSource& rng) {
  const double side = kMixGrid * kMixPatch;
  const double w = rng.uniform(1.5, 8.0) * kMixPatch;
  const double h = rng.uniform(1.5, 8.0) * kMixPatch;
  return {rng.uniform(0.0, side - w), rng.uniform(0.0, side - h), w, h};
}

struct MixSample {
  double mean_residual = 0.0;
  double std_residual = 0.0;
  double occluded = 0.0;
  bool fallback = false;
};

MixSample mix_one(const TfmixConfig& cfg, int dim, std::uint64_t seed, std::uint64_t i) {
  RngStream rng = rng_for(seed, "synthetic", 0, i, "mix");
  const TokenGrid search = random_grid(dim, rng);
  const TokenGrid distractor = random_grid(dim, rng);
  const TokenMask s_obj = object_token_mask(random_object(rng), search, cfg.token_overlap_threshold);
  const TokenMask d_obj = object_token_mask(random_object(rng), distractor, cfg.token_overlap_threshold);
  const MixOutcome o = tfmix(search, s_obj, distractor, d_obj, cfg, rng);

  const TokenStats got = token_stats(o.grid, o.replaced);
  const TokenStats& want = o.stats_target;
  MixSample s;
  s.mean_residual = std::abs(got.mean - want.mean) / std::max(std::abs(want.mean), want.std);
  s.std_residual = std::abs(got.std - want.std) / want.std;
  s.occluded = o.occluded_fraction;
  s.fallback = o.fallback;
  return s;
}

}  // namespace

MixStatsReport run_mix_stats(const TfmixConfig& cfg, std::uint64_t n, std::uint64_t seed, int workers, int dim) {
  cfg.validate();
  require(dim >= 1, "run_mix_stats: dim must be >= 1");
  require(cfg.token_overlap_threshold <= 0.5, "run_mix_stats: token_overlap_threshold above 0.5 may empty masks");
  std::vector<MixSample> samples(n);
  parallel_for(n, workers, [&](std::size_t i) { samples[i] = mix_one(cfg, dim, seed, i); });
  MixStatsReport r;
  r.n_mixes = n;
  for (const auto& s : samples) {
    r.max_mean_residual = std::max(r.max_mean_residual, s.mean_residual);
    r.max_std_residual = std::max(r.max_std_residual, s.std_residual);
    r.fallbacks += s.fallback;
    if (!s.fallback) r.max_accepted_occlusion = std::max(r.max_accepted_occlusion, s.occluded);
    r.occlusion_histogram.add(s.occluded);
  }
  return r;
}

namespace {

void put_histogram(std::ostream& os, const char* name, const Histogram& h) {
  const auto m = h.mass();
  const double width = (h.hi - h.lo) / static_cast<double>(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    os << name << '[' << i << "]: " << h.lo + width * static_cast<double>(i) << ' '
       << h.lo + width * static_cast<double>(i + 1) << ' ' << m[i] << '\n';
  }
}

std::ostringstream report_stream() {
  std::ostringstream os;
  os << std::setprecision(10);
  return os;
}

}  // namespace

std::string format_report(const StatsReport& r) {
  auto os = report_stream();
  os << "n_samples: " << r.n_samples << '\n'
     << "uninformative_rate: " << r.uninformative_rate << '\n'
     << "boundary_rate: " << r.boundary_rate << '\n'
     << "fallback_rate: " << r.fallback_rate << '\n'
     << "mean_retries: " << r.mean_retries << '\n'
     << "gamma_mean: " << r.gamma_mean << '\n'
     << "gamma_variance: " << r.gamma_variance << '\n'
     << "gamma_min: " << r.gamma_min << '\n'
     << "gamma_max: " << r.gamma_max << '\n'
     << "scale_min: " << r.scale_min << '\n'
     << "scale_max: " << r.scale_max << '\n';
  put_histogram(os, "gamma_histogram", r.gamma_histogram);
  put_histogram(os, "target_scale_histogram", r.target_scale_histogram);
  put_histogram(os, "center_offset_histogram", r.center_offset_histogram);
  return os.str();
}

std::string format_report(const MixStatsReport& r) {
  auto os = report_stream();
  os << "n_mixes: " << r.n_mixes << '\n'
     << "max_mean_residual: " << r.max_mean_residual << '\n'
     << "max_std_residual: " << r.max_std_residual << '\n'
     << "fallbacks: " << r.fallbacks << '\n'
     << "max_accepted_occlusion: " << r.max_accepted_occlusion << '\n';
  put_histogram(os, "occlusion_histogram", r.occlusion_histogram);
  return os.str();
}

std::string format_report(const SweepReport& r) {
  auto os = report_stream();
  os << "cropper: " << r.cropper << '\n' << "cells: " << r.cells.size() << '\n';
  for (const auto& c : r.cells) {
    os << "cell shift=" << c.shift << " scale=" << c.scale << ": uninformative_rate=" << c.report.uninformative_rate
       << " boundary_rate=" << c.report.boundary_rate << " gamma_variance=" << c.report.gamma_variance
       << " scale_support=[" << c.report.scale_min << ", " << c.report.scale_max << "]\n";
  }
  return os.str();
}

std::string sweep_csv(const SweepReport& r) {
  auto os = report_stream();
  os << "cropper,shift,scale,n,uninformative_rate,boundary_rate,fallback_rate,gamma_mean,gamma_variance,"
        "scale_min,scale_max\n";
  for (const auto& c : r.cells) {
    const auto& s = c.report;
    os << r.cropper << ',' << c.shift << ',' << c.scale << ',' << s.n_samples << ',' << s.uninformative_rate << ','
       << s.boundary_rate << ',' << s.fallback_rate << ',' << s.gamma_mean << ',' << s.gamma_variance << ','
       << s.scale_min << ',' << s.scale_max << '\n';
  }
  return os.str();
}

}  // namespace trackaug
