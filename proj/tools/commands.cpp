// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string_view>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "CLI11.hpp"
#include "json.hpp"
#include "trackaug/analysis.hpp"
#include "trackaug/config.hpp"
#include "trackaug/error.hpp"
#include "trackaug/manifest.hpp"
#include "trackaug/pipeline.hpp"

namespace trackaug::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string padded(std::uint64_t v, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*llu", width, static_cast<unsigned long long>(v));
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

template <typename T>
std::uint64_t hash_bytes(const std::vector<T>& v) {
  return hash_string({reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T)});
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  f << text;
  if (!f) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

/// Runs `body` and maps failures onto exit statuses.
template <typename Body>
int guarded(std::string_view name, std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "trackaug " << name << ": " << to_string(e.code()) << ": " << e.what() << '\n';
  } catch (const fs::filesystem_error& e) {
    err << "trackaug " << name << ": io: " << e.what() << '\n';
  } catch (const cv::Exception& e) {
    err << "trackaug " << name << ": io: " << e.what() << '\n';
  }
  return kFailure;
}

PipelineConfig config_with_seed(const fs::path& path, const std::optional<std::uint64_t>& seed) {
  PipelineConfig cfg = load_config(path);
  if (seed) cfg.seed = *seed;
  return cfg;
}

}  // namespace

EpochRange parse_epoch_range(const std::string& text) {
  auto number = [&](std::string_view s) {
    require(!s.empty() && s.find_first_not_of("0123456789") == std::string_view::npos,
            "epochs: expected N or A:B, got '" + text + "'");
    return static_cast<std::uint64_t>(std::stoull(std::string(s)));
  };
  const auto colon = text.find(':');
  EpochRange r;
  if (colon == std::string::npos) {
    r.end = number(text);
  } else {
    r.begin = number(std::string_view(text).substr(0, colon));
    r.end = number(std::string_view(text).substr(colon + 1));
  }
  require(*r.end > r.begin, "epochs: range '" + text + "' is empty");
  return r;
}

int cmd_augment(const AugmentOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded("augment", err, [&] {
    PipelineConfig cfg = config_with_seed(opts.config, opts.seed);
    const std::uint64_t end = opts.epochs.end.value_or(cfg.epochs);
    require(end > opts.epochs.begin, "augment: empty epoch range");
    cfg.epochs = std::max(cfg.epochs, end);
    const Pipeline pipe(cfg);

    fs::create_directories(opts.out);
    std::ofstream manifest(opts.out / cfg.output.manifest_name, std::ios::binary);
    if (!manifest) fail(ErrorCode::kIo, "cannot write manifest in '" + opts.out.string() + "'");
    manifest << kManifestHeader << '\n';

    const std::size_t chunk = 64 * static_cast<std::size_t>(std::max(1, opts.workers));
    std::uint64_t written = 0;
    for (std::uint64_t epoch = opts.epochs.begin; epoch < end; ++epoch) {
      const std::string dir = "e" + padded(epoch, 4);
      fs::create_directories(opts.out / dir);
      for (std::uint64_t start = 0; start < cfg.samples_per_epoch; start += chunk) {
        const std::size_t count = std::min<std::uint64_t>(chunk, cfg.samples_per_epoch - start);
        std::vector<std::string> lines(count);
        parallel_for(count, opts.workers, [&](std::size_t i) {
          const std::uint64_t index = start + i;
          const TrainingPair p = pipe.sample(epoch, index);
          const std::string t_rel = dir + "/t_" + padded(index, 6) + ".png";
          const std::string s_rel = dir + "/s_" + padded(index, 6) + ".png";
          write_png(opts.out / t_rel, p.template_patch.as_image());
          write_png(opts.out / s_rel, p.search_patch.as_image());
          lines[i] = manifest_line(p, cfg.seed, t_rel, s_rel);
        });
        for (const auto& l : lines) manifest << l << '\n';
        written += count;
      }
    }
    manifest.close();
    if (!manifest) fail(ErrorCode::kIo, "manifest write failed");
    out << "wrote " << written << " samples to " << opts.out.string() << '\n';
    return kOk;
  });
}

int cmd_preview(const PreviewOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.n <= 0) {
    err << "trackaug preview: --n must be >= 1\n";
    return kUsage;
  }
  return guarded("preview", err, [&] {
    const PipelineConfig cfg = config_with_seed(opts.config, opts.seed);
    const Pipeline pipe(cfg);
    const auto n = static_cast<std::size_t>(opts.n);
    std::vector<TrainingPair> pairs(n);
    parallel_for(n, opts.workers, [&](std::size_t i) { pairs[i] = pipe.sample(opts.epoch, i); });

    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    const int rows = static_cast<int>((n + cols - 1) / cols);
    const int side = cfg.policy.search_out_size;
    constexpr int kLabel = 18;
    constexpr int kGap = 4;
    const int cell_w = side + kGap;
    const int cell_h = side + kLabel + kGap;
    cv::Mat canvas(rows * cell_h + kGap, cols * cell_w + kGap, CV_8UC3, cv::Scalar(32, 32, 32));

    json tiles = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      const TrainingPair& p = pairs[i];
      const int x0 = kGap + static_cast<int>(i % cols) * cell_w;
      const int y0 = kGap + static_cast<int>(i / cols) * cell_h;
      cv::Mat tile = canvas(cv::Rect(x0, y0, side, side));
      for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
          tile.at<cv::Vec3b>(y, x) = {p.search_patch.at(x, y, 2), p.search_patch.at(x, y, 1), p.search_patch.at(x, y, 0)};
        }
      }
      const bool boundary = p.search_crop.kind == CropKind::kBoundary;
      const cv::Scalar bgr = boundary ? cv::Scalar(0, 0, 255) : cv::Scalar(0, 255, 0);
      const BBox& b = p.search_box;
      const cv::Point tl(static_cast<int>(std::floor(b.x)), static_cast<int>(std::floor(b.y)));
      const cv::Point br(static_cast<int>(std::ceil(b.right())) - 1, static_cast<int>(std::ceil(b.bottom())) - 1);
      cv::rectangle(tile, tl, br, bgr, 1);
      char label[64];
      std::snprintf(label, sizeof label, "%s g=%.2f", std::string(to_string(p.search_crop.kind)).c_str(),
                    p.search_crop.gamma);
      cv::putText(canvas, label, cv::Point(x0 + 2, y0 + side + kLabel - 5), cv::FONT_HERSHEY_SIMPLEX, 0.4,
                  cv::Scalar(255, 255, 255), 1, cv::LINE_8);

      json t = {{"index", i},
                {"x", x0},
                {"y", y0},
                {"size", side},
                {"kind", std::string(to_string(p.search_crop.kind))},
                {"gamma", p.search_crop.gamma},
                {"box", {b.x, b.y, b.w, b.h}},
                {"box_pixels", {tl.x, tl.y, br.x, br.y}},
                {"box_rgb", {bgr[2], bgr[1], bgr[0]}}};
      t["direction"] = p.search_crop.direction ? json(std::string(to_string(*p.search_crop.direction))) : json(nullptr);
      tiles.push_back(std::move(t));
    }
    if (opts.out.has_parent_path()) fs::create_directories(opts.out.parent_path());
    if (!cv::imwrite(opts.out.string(), canvas)) fail(ErrorCode::kIo, "cannot write '" + opts.out.string() + "'");
    fs::path sidecar = opts.out;
    sidecar.replace_extension(".json");
    const json doc = {{"n", n}, {"rows", rows}, {"cols", cols}, {"tiles", tiles}};
    write_text(sidecar, doc.dump(2) + "\n");
    out << "wrote " << rows << "x" << cols << " grid to " << opts.out.string() << '\n';
    return kOk;
  });
}

int cmd_stats(const StatsOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.mode != "crop" && opts.mode != "sweep" && opts.mode != "mix") {
    err << "trackaug stats: --mode must be crop, sweep or mix\n";
    return kUsage;
  }
  if (opts.cropper != "orc" && opts.cropper != "legacy") {
    err << "trackaug stats: --cropper must be orc or legacy\n";
    return kUsage;
  }
  if (opts.n == 0) {
    err << "trackaug stats: --n must be >= 1\n";
    return kUsage;
  }
  return guarded("stats", err, [&] {
    PipelineConfig cfg;
    if (opts.config) cfg = load_config(*opts.config);
    const std::uint64_t seed = opts.seed.value_or(cfg.seed);
    const CropperSpec spec = opts.cropper == "orc" ? CropperSpec::orc(cfg.policy)
                                                   : CropperSpec::legacy(opts.gamma_fix, cfg.policy.jitter);
    fs::create_directories(opts.out);
    std::string text;
    if (opts.mode == "crop") {
      text = "mode: crop\ncropper: " + opts.cropper + "\n" + format_report(run_crop_stats(spec, opts.n, seed, opts.workers));
      write_text(opts.out / ("crop_" + opts.cropper + ".txt"), text);
    } else if (opts.mode == "sweep") {
      const SweepReport r = run_jitter_sweep(kSweepShifts, kSweepScales, spec, opts.n, seed, opts.workers);
      text = "mode: sweep\n" + format_report(r);
      write_text(opts.out / ("sweep_" + opts.cropper + ".txt"), text);
      write_text(opts.out / ("sweep_" + opts.cropper + ".csv"), sweep_csv(r));
    } else {
      text = "mode: mix\n" + format_report(run_mix_stats(cfg.policy.tfmix, opts.n, seed, opts.workers));
      write_text(opts.out / "mix_report.txt", text);
    }
    out << text;
    return kOk;
  });
}

namespace {

using Clock = std::chrono::steady_clock;

struct Measurement {
  int workers = 1;
  std::uint64_t items = 0;
  std::uint64_t rounds = 0;
  double seconds = 0.0;
  std::uint64_t digest = 0;
};

/// `item(i)` returns a content hash of work item i.
Measurement measure(std::uint64_t n, double duration, int workers,
                    const std::function<std::uint64_t(std::uint64_t)>& item) {
  Measurement m;
  m.workers = workers;
  std::vector<std::uint64_t> hashes(n);
  const auto t0 = Clock::now();
  do {
    const std::uint64_t base = m.rounds * n;
    parallel_for(n, workers, [&](std::size_t i) { hashes[i] = item(base + i); });
    if (m.rounds == 0) {
      for (auto h : hashes) m.digest += h;
    }
    ++m.rounds;
    m.items += n;
    m.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  } while (m.seconds < duration);
  return m;
}

json measurement_json(const Measurement& m) {
  return {{"workers", m.workers},
          {"items", m.items},
          {"rounds", m.rounds},
          {"seconds", m.seconds},
          {"per_second", m.seconds > 0.0 ? static_cast<double>(m.items) / m.seconds : 0.0},
          {"digest", hex64(m.digest)}};
}

TokenGrid bench_grid(int dim, RandomSource& rng) {
  TokenGrid g(16, 16, dim, 16);
  for (double& v : g.values) v = 255.0 * rng.next_unit();
  return g;
}

}  // namespace

int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.n == 0 || opts.duration < 0.0 || opts.workers < 1) {
    err << "trackaug bench: need --n >= 1, --duration >= 0 and --workers >= 1\n";
    return kUsage;
  }
  return guarded("bench", err, [&] {
    const PipelineConfig cfg = config_with_seed(opts.config, opts.seed);
    const Pipeline pipe(cfg);
    const std::uint64_t seed = cfg.seed;
    const AugPolicy& policy = cfg.policy;

    auto crop_item = [&](std::uint64_t i) {
      RngStream t = rng_for(seed, "bench", 0, i, "target");
      RngStream c = rng_for(seed, "bench", 0, i, "crop");
      const CropOutcome o = orc_sample(synthetic_target(t), policy, c);
      const std::vector<double> v = {o.window.box.x, o.window.box.y, o.window.box.w, o.gamma};
      return hash_bytes(v);
    };
    auto pair_item = [&](std::uint64_t i) {
      const TrainingPair p = pipe.sample(0, i);
      return hash_bytes(p.search_patch.pixels) ^ mix64(hash_bytes(p.template_patch.pixels));
    };
    TfmixConfig mix_cfg = policy.tfmix;
    mix_cfg.fixed_position = false;
    auto mix_item = [&](std::uint64_t i) {
      RngStream rng = rng_for(seed, "bench", 0, i, "mix");
      const TokenGrid s = bench_grid(3 * 16 * 16, rng);
      const TokenGrid d = bench_grid(3 * 16 * 16, rng);
      const TokenMask sm = object_token_mask({64.0, 64.0, 96.0, 80.0}, s, 0.5);
      const TokenMask dm = object_token_mask({rng.uniform(0.0, 128.0), rng.uniform(0.0, 128.0), 64.0, 64.0}, d, 0.5);
      return hash_bytes(tfmix(s, sm, d, dm, mix_cfg, rng).grid.values);
    };

    json report = {{"n", opts.n}, {"duration", opts.duration}, {"seed", seed}};
    const std::pair<const char*, std::function<std::uint64_t(std::uint64_t)>> kinds[] = {
        {"crops", crop_item}, {"pairs", pair_item}, {"tfmix", mix_item}};
    for (const auto& [name, fn] : kinds) {
      const Measurement single = measure(opts.n, opts.duration, 1, fn);
      const Measurement multi = measure(opts.n, opts.duration, opts.workers, fn);
      report[name] = {{"single", measurement_json(single)}, {"multi", measurement_json(multi)}};
      report[std::string(name) + "_per_second"] = report[name]["single"]["per_second"];
    }
    const std::string text = report.dump(2) + "\n";
    if (opts.out) {
      if (opts.out->has_parent_path()) fs::create_directories(opts.out->parent_path());
      write_text(*opts.out, text);
    }
    out << text;
    return kOk;
  });
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tracking-pair augmentation: crop, augment, mix and analyse"};
  app.name("trackaug");
  app.require_subcommand(1);

  AugmentOptions aug;
  std::string epochs;
  auto* a = app.add_subcommand("augment", "Write augmented patch pairs and a manifest");
  a->add_option("--config", aug.config, "Pipeline config (JSON)")->required();
  a->add_option("--out", aug.out, "Output directory")->required();
  a->add_option("--seed", aug.seed, "Override the config seed");
  a->add_option("--epochs", epochs, "N or A:B (half-open); default: config epochs");
  a->add_option("--workers", aug.workers, "Worker threads")->check(CLI::PositiveNumber);

  PreviewOptions prev;
  auto* p = app.add_subcommand("preview", "Render a grid of annotated search patches");
  p->add_option("--config", prev.config, "Pipeline config (JSON)")->required();
  p->add_option("--out", prev.out, "Output PNG")->required();
  p->add_option("--n", prev.n, "Number of tiles");
  p->add_option("--seed", prev.seed, "Override the config seed");
  p->add_option("--epoch", prev.epoch, "Epoch to sample from");
  p->add_option("--workers", prev.workers, "Worker threads")->check(CLI::PositiveNumber);

  StatsOptions st;
  auto* s = app.add_subcommand("stats", "Monte-Carlo crop, sweep and mixing reports");
  s->add_option("--config", st.config, "Config providing the policy; defaults when omitted");
  s->add_option("--out", st.out, "Report directory")->required();
  s->add_option("--mode", st.mode, "crop | sweep | mix");
  s->add_option("--cropper", st.cropper, "orc | legacy");
  s->add_option("--gamma-fix", st.gamma_fix, "Legacy search factor");
  s->add_option("--n", st.n, "Samples per report");
  s->add_option("--seed", st.seed, "Override the config seed");
  s->add_option("--workers", st.workers, "Worker threads")->check(CLI::PositiveNumber);

  BenchOptions bench;
  auto* b = app.add_subcommand("bench", "Throughput of crops, pairs and tfmix");
  b->add_option("--config", bench.config, "Pipeline config (JSON)")->required();
  b->add_option("--out", bench.out, "JSON report path; stdout only when omitted");
  b->add_option("--duration", bench.duration, "Seconds per measurement");
  b->add_option("--n", bench.n, "Items per round");
  b->add_option("--workers", bench.workers, "Workers for the multi-worker measurement");
  b->add_option("--seed", bench.seed, "Override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (a->parsed()) {
    if (!epochs.empty()) {
      try {
        aug.epochs = parse_epoch_range(epochs);
      } catch (const Error& e) {
        err << "trackaug augment: " << e.what() << '\n';
        return kUsage;
      }
    }
    return cmd_augment(aug, out, err);
  }
  if (p->parsed()) return cmd_preview(prev, out, err);
  if (s->parsed()) return cmd_stats(st, out, err);
  return cmd_bench(bench, out, err);
}

}  // namespace trackaug::cli
