// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "trackaug/gda.hpp"
#include "trackaug/geometry.hpp"
#include "trackaug/mixing.hpp"

namespace trackaug {

/// Every knob of the augmentation pipeline. Cropping defaults follow the
/// [2, 6] search-factor range used with an inference factor of 4 and a 5%
/// boundary-sample rate.
struct AugPolicy {
  double gamma_min = 2.0;
  double gamma_max = 6.0;
  double p_boundary = 0.05;
  JitterParams jitter{3.0, 0.25};
  int search_out_size = 256;
  int template_out_size = 128;
  double template_gamma = 2.0;
  double v_min = 0.3;
  int max_retries = 20;
  GdaConfig gda;
  TfmixConfig tfmix;

  void validate() const;

  friend bool operator==(const AugPolicy&, const AugPolicy&) = default;
};

struct CropOutcome {
  CropWindow window;
  double gamma = 0.0;
  CropKind kind = CropKind::kNormal;
  int retries_used = 0;
  std::optional<Direction> direction;  // boundary samples only

  friend bool operator==(const CropOutcome&, const CropOutcome&) = default;
};

/// Optimized random cropping.
///
/// A search factor is drawn from [gamma_min, gamma_max] first. With
/// probability p_boundary the crop is centred on the target with that factor
/// and pushed toward a random edge until the target straddles it. Otherwise a
/// jittered box is drawn repeatedly until its practical minimum factor fits
/// under gamma_max; the factor is then drawn from [practical_min, gamma_max]
/// and the crop is centred on the jittered box, so the target centre is
/// always inside.
///
/// After `max_retries` failed draws the crop is re-centred on the target
/// with a factor from [gamma_min, gamma_max]. Boundary placements that are
/// geometrically infeasible are redrawn (factor and direction) up to
/// `max_retries` times before falling through to the jittered branch.
CropOutcome orc_sample(const BBox& target, const AugPolicy& policy, RandomSource& rng);

/// Fixed-factor cropping around a jittered box; no rejection, so the target
/// centre may fall outside the crop.
CropOutcome legacy_sample(const BBox& target, double gamma_fix, const JitterParams& jitter, RandomSource& rng);

CropOutcome template_crop(const BBox& target, const AugPolicy& policy);

}  // namespace trackaug
