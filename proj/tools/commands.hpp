// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace trackaug::cli {

/// Exit statuses shared by every command.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // config, dataset or I/O error
inline constexpr int kUsage = 2;

/// Half-open epoch range; `end` unset means the config's epoch count.
struct EpochRange {
  std::uint64_t begin = 0;
  std::optional<std::uint64_t> end;
};

/// Parses "N" (epochs [0, N)) or "A:B" (epochs [A, B)). Throws kInvalidArgument.
EpochRange parse_epoch_range(const std::string& text);

struct AugmentOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  EpochRange epochs;
  int workers = 1;
};

/// Writes e<epoch>/t_<index>.png, e<epoch>/s_<index>.png and a manifest with
/// one line per sample in (epoch, index) order.
int cmd_augment(const AugmentOptions& opts, std::ostream& out, std::ostream& err);

struct PreviewOptions {
  std::filesystem::path config;
  std::filesystem::path out;  // PNG; a JSON sidecar is written next to it
  int n = 9;
  std::optional<std::uint64_t> seed;
  std::uint64_t epoch = 0;
  int workers = 1;
};

/// Grid of search patches with the target box, crop kind and factor drawn on
/// each tile. The sidecar lists tile positions and boxes.
int cmd_preview(const PreviewOptions& opts, std::ostream& out, std::ostream& err);

struct StatsOptions {
  std::optional<std::filesystem::path> config;  // policy source; defaults otherwise
  std::filesystem::path out;                    // report directory
  std::string mode = "crop";                    // crop | sweep | mix
  std::string cropper = "orc";                  // orc | legacy
  double gamma_fix = 4.0;
  std::uint64_t n = 100000;
  std::optional<std::uint64_t> seed;
  int workers = 1;
};

int cmd_stats(const StatsOptions& opts, std::ostream& out, std::ostream& err);

struct BenchOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;  // JSON report; stdout when unset
  double duration = 1.0;                     // seconds per measurement
  std::uint64_t n = 64;                      // items per round
  int workers = 4;                           // multi-worker measurement
  std::optional<std::uint64_t> seed;
};

/// Crops, full pairs and tfmix operations per second, single- and
/// multi-worker. Each measurement repeats rounds of `n` items until
/// `duration` has passed (at least one round). Digests cover the first round
/// only, so they do not depend on timing or worker count.
int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err);

/// Full command line: `trackaug <augment|preview|stats|bench> [flags]`.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace trackaug::cli
