// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "trackaug/analysis.hpp"
#include "trackaug/cropping.hpp"
#include "trackaug/image.hpp"
#include "trackaug/mixing.hpp"
#include "trackaug/pipeline.hpp"

namespace {

using namespace trackaug;

Image frame(int w, int h) {
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      img.at(x, y, 0) = static_cast<std::uint8_t>(x * 7 + y);
      img.at(x, y, 1) = static_cast<std::uint8_t>(y * 3);
      img.at(x, y, 2) = static_cast<std::uint8_t>((x ^ y) & 0xff);
    }
  return img;
}

void BM_OrcSample(benchmark::State& state) {
  const AugPolicy policy;
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream t = rng_for(1, "bench", 0, i, "target");
    RngStream c = rng_for(1, "bench", 0, i++, "crop");
    benchmark::DoNotOptimize(orc_sample(synthetic_target(t), policy, c));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_OrcSample);

void BM_LegacySample(benchmark::State& state) {
  const JitterParams jitter{3.0, 0.25};
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream t = rng_for(1, "bench", 0, i, "target");
    RngStream c = rng_for(1, "bench", 0, i++, "crop");
    benchmark::DoNotOptimize(legacy_sample(synthetic_target(t), 4.0, jitter, c));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LegacySample);

void BM_ExtractPatch(benchmark::State& state) {
  const Image img = frame(1280, 720);
  const int out = static_cast<int>(state.range(0));
  const CropWindow crop = center_crop({500, 300, 120, 90}, 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(extract_patch(img, crop, out));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ExtractPatch)->Arg(128)->Arg(256);

void BM_Tfmix(benchmark::State& state) {
  RngStream rng(3);
  TokenGrid s(16, 16, 768, 16), d(16, 16, 768, 16);
  for (double& v : s.values) v = 255.0 * rng.next_unit();
  for (double& v : d.values) v = 255.0 * rng.next_unit();
  const TokenMask sm = object_token_mask({64, 64, 96, 80}, s, 0.5);
  const TokenMask dm = object_token_mask({32, 100, 64, 64}, d, 0.5);
  const TfmixConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(tfmix(s, sm, d, dm, cfg, rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Tfmix);

void BM_BuildTrainingPair(benchmark::State& state) {
  const Image img = frame(640, 480);
  const FrameLoader loader = [&](const std::filesystem::path&) { return img; };
  SamplePair sample;
  sample.template_frame = sample.search_frame = "frame";
  sample.template_box = {200, 150, 60, 45};
  sample.search_box = {214, 158, 62, 44};
  sample.dataset_id = "bench";
  sample.object_id = "bench/0";
  const AugPolicy policy;
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(build_training_pair(sample, policy, 1, 0, i++, loader));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BuildTrainingPair);

}  // namespace

BENCHMARK_MAIN();
