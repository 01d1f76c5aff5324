// SPDX-License-Identifier: Apache-2.0

#include "trackaug/cropping.hpp"

#include <array>
#include <cmath>

#include "trackaug/error.hpp"

namespace trackaug {

void AugPolicy::validate() const {
  require(std::isfinite(gamma_min) && std::isfinite(gamma_max) && gamma_min > 0.0 && gamma_min <= gamma_max,
          "policy: need 0 < gamma_min <= gamma_max");
  require(p_boundary >= 0.0 && p_boundary <= 1.0, "policy: p_boundary must lie in [0, 1]");
  require(std::isfinite(jitter.shift) && jitter.shift >= 0.0 && std::isfinite(jitter.scale) && jitter.scale >= 0.0,
          "policy: jitter factors must be finite and >= 0");
  require(search_out_size >= 16 && template_out_size >= 16, "policy: output sizes must be >= 16");
  require(std::isfinite(template_gamma) && template_gamma > 0.0, "policy: template_gamma must be > 0");
  require(v_min > 0.0 && v_min < 1.0, "policy: v_min must lie in (0, 1)");
  require(max_retries >= 1, "policy: max_retries must be >= 1");
  gda.validate();
  tfmix.validate();
}

namespace {
constexpr std::array<Direction, 4> kDirections{Direction::kTop, Direction::kBottom, Direction::kLeft,
                                               Direction::kRight};
}

CropOutcome orc_sample(const BBox& target, const AugPolicy& policy, RandomSource& rng) {
  validate(target, "orc_sample");
  double gamma = rng.uniform(policy.gamma_min, policy.gamma_max);

  if (rng.bernoulli(policy.p_boundary)) {
    for (int attempt = 0; attempt < policy.max_retries; ++attempt) {
      if (attempt > 0) gamma = rng.uniform(policy.gamma_min, policy.gamma_max);
      const Direction dir = kDirections[rng.index(kDirections.size())];
      try {
        const CropWindow moved =
            shift_to_boundary(center_crop(target, gamma), target, dir, policy.v_min, rng);
        return {moved, gamma, CropKind::kBoundary, attempt, dir};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kInfeasibleBoundary) throw;
      }
    }
  }

  for (int retry = 0; retry < policy.max_retries; ++retry) {
    const BBox jittered = jitter(target, policy.jitter, rng);
    const double floor_gamma = practical_min_gamma(target, jittered, policy.gamma_min);
    if (floor_gamma <= policy.gamma_max) {
      gamma = rng.uniform(floor_gamma, policy.gamma_max);
      return {center_crop(jittered, gamma), gamma, CropKind::kNormal, retry, std::nullopt};
    }
  }
  gamma = rng.uniform(policy.gamma_min, policy.gamma_max);
  return {center_crop(target, gamma), gamma, CropKind::kNormal, policy.max_retries, std::nullopt};
}

CropOutcome legacy_sample(const BBox& target, double gamma_fix, const JitterParams& params, RandomSource& rng) {
  require(std::isfinite(gamma_fix) && gamma_fix > 0.0, "legacy_sample: gamma_fix must be > 0");
  CropWindow w = center_crop(jitter(target, params, rng), gamma_fix);
  w.kind = CropKind::kLegacy;
  return {w, gamma_fix, CropKind::kLegacy, 0, std::nullopt};
}

CropOutcome template_crop(const BBox& target, const AugPolicy& policy) {
  CropWindow w = center_crop(target, policy.template_gamma);
  w.kind = CropKind::kTemplate;
  return {w, policy.template_gamma, CropKind::kTemplate, 0, std::nullopt};
}

}  // namespace trackaug
