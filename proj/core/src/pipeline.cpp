// SPDX-License-Identifier: Apache-2.0

#include "trackaug/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "trackaug/config.hpp"
#include "trackaug/error.hpp"

namespace trackaug {

void PipelineConfig::validate() const {
  policy.validate();
  require(samples_per_epoch >= 1, "config: samples_per_epoch must be >= 1");
  require(epochs >= 1, "config: epochs must be >= 1");
  require(max_frame_gap >= 0, "config: max_frame_gap must be >= 0");
  require(!output.manifest_name.empty(), "config: output.manifest_name must not be empty");
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    const auto& d = datasets[i];
    const std::string ctx = "config: datasets[" + std::to_string(i) + "]";
    require(!d.id.empty(), ctx + ".id must not be empty");
    require(d.weight > 0.0 && std::isfinite(d.weight), ctx + ".weight must be > 0");
    require(d.fraction > 0.0 && d.fraction <= 1.0, ctx + ".fraction must lie in (0, 1]");
    for (std::size_t j = 0; j < i; ++j) require(datasets[j].id != d.id, ctx + ".id duplicates '" + d.id + "'");
  }
  const auto& mix = policy.tfmix;
  if (mix.enabled) {
    require(mix.mode != MixMode::kImageMask,
            "config: policy.tfmix.mode 'image_mask' needs mask annotations and is library-only");
    if (mix.mode == MixMode::kTokenFeature || mix.mode == MixMode::kTokenImage) {
      require(policy.search_out_size % mix.patch_size == 0,
              "config: policy.search_out_size must be divisible by policy.tfmix.patch_size");
    }
  }
}

namespace {

/// Frames of one sample, loaded once.
class FrameCache {
 public:
  explicit FrameCache(const FrameLoader& loader) : loader_(loader) {}

  const Image& get(const std::filesystem::path& p) {
    for (auto& [path, img] : entries_) {
      if (path == p) return img;
    }
    entries_.emplace_back(p, loader_(p));
    return entries_.back().second;
  }

 private:
  const FrameLoader& loader_;
  std::vector<std::pair<std::filesystem::path, Image>> entries_;
};

void apply_mix(TrainingPair& pair, const AugPolicy& policy, RandomSource& rng, FrameCache& frames,
               const DistractorSource& distractors) {
  const TfmixConfig& cfg = policy.tfmix;
  MixRecord& rec = pair.mix;
  rec.mode = cfg.mode;
  if (!distractors) {
    rec.skipped = "no distractor source";
    return;
  }
  const std::optional<SamplePair> d = distractors(pair.source, rng);
  if (!d) {
    rec.skipped = "no distractor";
    return;
  }
  rec.distractor_id = d->object_id;
  const CropWindow dwin = center_crop(d->search_box, pair.search_crop.gamma);
  const Patch dpatch = extract_patch(frames.get(d->search_frame), dwin, policy.search_out_size);
  const BBox dbox = map_box_to_patch(d->search_box, dwin, policy.search_out_size);

  switch (cfg.mode) {
    case MixMode::kTokenFeature: {
      const TokenGrid search = tokenize(pair.search_patch, cfg.patch_size);
      const TokenGrid dist = tokenize(dpatch, cfg.patch_size);
      const TokenMask sobj = object_token_mask(pair.search_box, search, cfg.token_overlap_threshold);
      const TokenMask dobj = object_token_mask(dbox, dist, cfg.token_overlap_threshold);
      if (sobj.count() == 0 || dobj.count() == 0) {
        rec.skipped = "empty object tokens";
        return;
      }
      const MixOutcome out = tfmix(search, sobj, dist, dobj, cfg, rng);
      untokenize(out.grid, pair.search_patch);
      rec.occluded_fraction = out.occluded_fraction;
      rec.fallback = out.fallback;
      rec.replaced = out.replaced.count();
      rec.stats_source = out.stats_source;
      rec.stats_target = out.stats_target;
      break;
    }
    case MixMode::kImageBox: {
      ImageMixOutcome out = cutmix_bbox(pair.search_patch, pair.search_box, dpatch, dbox, cfg, rng);
      pair.search_patch = std::move(out.patch);
      rec.occluded_fraction = out.occluded_fraction;
      rec.fallback = out.fallback;
      rec.replaced = out.written;
      break;
    }
    case MixMode::kTokenImage: {
      TokenImageMixOutcome out = token_image_mix(pair.search_patch, dpatch, cfg.patch_size, rng,
                                                 cfg.token_image_min_ratio, cfg.token_image_max_ratio);
      pair.search_patch = std::move(out.patch);
      rec.replaced = out.replaced.count();
      rec.occluded_fraction = out.ratio;
      break;
    }
    case MixMode::kImageMask:
      rec.skipped = "image_mask mode needs caller-provided masks";
      return;
  }
  rec.applied = true;
}

}  // namespace

TrainingPair build_training_pair(const SamplePair& sample, const AugPolicy& policy, std::uint64_t seed,
                                 std::uint64_t epoch, std::uint64_t index, const FrameLoader& loader,
                                 const DistractorSource& distractors) {
  const FrameLoader& load = loader ? loader : FrameLoader(load_image);
  FrameCache frames(load);
  auto stream = [&](std::string_view stage) { return rng_for(seed, sample.dataset_id, epoch, index, stage); };

  TrainingPair pair;
  pair.epoch = epoch;
  pair.index = index;
  pair.source = sample;

  pair.template_crop = template_crop(sample.template_box, policy);
  pair.template_patch =
      extract_patch(frames.get(sample.template_frame), pair.template_crop.window, policy.template_out_size);
  pair.template_box = map_box_to_patch(sample.template_box, pair.template_crop.window, policy.template_out_size);

  RngStream crop_rng = stream("crop");
  pair.search_crop = orc_sample(sample.search_box, policy, crop_rng);
  pair.search_patch = extract_patch(frames.get(sample.search_frame), pair.search_crop.window, policy.search_out_size);
  pair.search_box = map_box_to_patch(sample.search_box, pair.search_crop.window, policy.search_out_size);

  RngStream gda_t = stream("gda_template");
  pair.template_gda = apply_gda(pair.template_patch, pair.template_box, policy.gda, gda_t);
  RngStream gda_s = stream("gda_search");
  pair.search_gda = apply_gda(pair.search_patch, pair.search_box, policy.gda, gda_s);

  pair.mix.mode = policy.tfmix.mode;
  if (epoch_schedule(epoch, policy.tfmix).tfmix_active) {
    pair.mix.active = true;
    RngStream mix_rng = stream("mix");
    apply_mix(pair, policy, mix_rng, frames, distractors);
  }
  return pair;
}

Pipeline::Pipeline(PipelineConfig config, FrameLoader loader)
    : config_(std::move(config)), loader_(loader ? std::move(loader) : FrameLoader(load_image)) {
  config_.validate();
  require(!config_.datasets.empty(), "config: at least one dataset is required");
  double total = 0.0;
  for (const auto& spec : config_.datasets) {
    Dataset ds = spec.type == DatasetKind::kImage ? load_image_dataset(spec.path, spec.id, spec.image_root)
                                                  : load_sequence_dataset(spec.path, spec.id);
    datasets_.push_back(subset_fraction(ds, spec.fraction, config_.seed));
    total += spec.weight;
    cumulative_weights_.push_back(total);
  }
  std::vector<const Dataset*> ptrs;
  for (const auto& ds : datasets_) ptrs.push_back(&ds);
  categories_ = CategoryIndex(ptrs);
}

Pipeline Pipeline::open(const std::filesystem::path& config_path) { return Pipeline(load_config(config_path)); }

SamplePair Pipeline::draw_sample(std::uint64_t epoch, std::uint64_t index) const {
  std::size_t which = 0;
  if (datasets_.size() > 1) {
    RngStream pick = rng_for(config_.seed, "", epoch, index, "dataset");
    const double u = pick.next_unit() * cumulative_weights_.back();
    which = static_cast<std::size_t>(
        std::upper_bound(cumulative_weights_.begin(), cumulative_weights_.end(), u) - cumulative_weights_.begin());
    which = std::min(which, datasets_.size() - 1);
  }
  const Dataset& ds = datasets_[which];
  RngStream rng = rng_for(config_.seed, ds.id, epoch, index, "pair");
  return draw_pair(ds, rng, config_.max_frame_gap);
}

std::optional<SamplePair> Pipeline::distractor_for(const SamplePair& query, RandomSource& rng) const {
  std::optional<ObjectRef> ref;
  try {
    ref = select_distractor(categories_, query.category, query.object_id, rng, config_.policy.tfmix.same_category_first);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoDistractor) throw;
    return std::nullopt;
  }
  return draw_pair_for(datasets_[ref->dataset], ref->object, rng, config_.max_frame_gap);
}

TrainingPair Pipeline::sample(std::uint64_t epoch, std::uint64_t index) const {
  const SamplePair s = draw_sample(epoch, index);
  DistractorSource distractors = [this](const SamplePair& q, RandomSource& rng) { return distractor_for(q, rng); };
  return build_training_pair(s, config_.policy, config_.seed, epoch, index, loader_, distractors);
}

BatchBuffers Pipeline::next_batch(std::uint64_t epoch, std::uint64_t start_index, std::size_t count,
                                  int workers) const {
  if (epoch >= config_.epochs) {
    fail(ErrorCode::kRange, "next_batch: epoch " + std::to_string(epoch) + " outside [0, " +
                                std::to_string(config_.epochs) + ")");
  }
  if (start_index > config_.samples_per_epoch || count > config_.samples_per_epoch - start_index) {
    fail(ErrorCode::kRange, "next_batch: indices [" + std::to_string(start_index) + ", " +
                                std::to_string(start_index + count) + ") outside [0, " +
                                std::to_string(config_.samples_per_epoch) + ")");
  }
  const int S = config_.policy.search_out_size;
  const int T = config_.policy.template_out_size;
  const std::size_t s_px = static_cast<std::size_t>(S) * S * 3;
  const std::size_t t_px = static_cast<std::size_t>(T) * T * 3;

  BatchBuffers b;
  b.count = count;
  b.search_size = S;
  b.template_size = T;
  b.search_pixels.resize(count * s_px);
  b.template_pixels.resize(count * t_px);
  b.search_boxes.resize(count * 4);
  b.template_boxes.resize(count * 4);
  b.gammas.resize(count);
  b.kinds.resize(count);
  b.mix_applied.resize(count);
  b.occluded.resize(count);

  parallel_for(count, workers, [&](std::size_t i) {
    const TrainingPair p = sample(epoch, start_index + i);
    std::copy(p.search_patch.pixels.begin(), p.search_patch.pixels.end(), b.search_pixels.begin() + i * s_px);
    std::copy(p.template_patch.pixels.begin(), p.template_patch.pixels.end(), b.template_pixels.begin() + i * t_px);
    const BBox& sb = p.search_box;
    const BBox& tb = p.template_box;
    const float sv[4] = {static_cast<float>(sb.x), static_cast<float>(sb.y), static_cast<float>(sb.w), static_cast<float>(sb.h)};
    const float tv[4] = {static_cast<float>(tb.x), static_cast<float>(tb.y), static_cast<float>(tb.w), static_cast<float>(tb.h)};
    std::copy(sv, sv + 4, b.search_boxes.begin() + i * 4);
    std::copy(tv, tv + 4, b.template_boxes.begin() + i * 4);
    b.gammas[i] = static_cast<float>(p.search_crop.gamma);
    b.kinds[i] = static_cast<std::uint8_t>(p.search_crop.kind);
    b.mix_applied[i] = p.mix.applied ? 1 : 0;
    b.occluded[i] = static_cast<float>(p.mix.occluded_fraction);
  });
  return b;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const auto w = static_cast<std::size_t>(std::max(1, workers));
  if (w == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::size_t err_index = n;
  std::exception_ptr err;
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < std::min(w, n); ++t) threads.emplace_back(run);
  for (auto& t : threads) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace trackaug
