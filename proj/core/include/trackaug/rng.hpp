// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace trackaug {

/// Source of uniform variates. Every random decision in the library is
/// expressed through `next_unit()`, so a test double that scripts unit draws
/// can steer any operation deterministically.
///
/// Degenerate requests consume nothing: `uniform(a, a)`, `bernoulli(0)`,
/// `bernoulli(1)` and `index(1)` return without drawing. This keeps the draw
/// sequence of a pipeline stable when a knob is switched off.
class RandomSource {
 public:
  virtual ~RandomSource() = default;

  /// Uniform on [0, 1).
  virtual double next_unit() = 0;

  /// Uniform on [lo, hi); exactly `lo` when lo == hi.
  double uniform(double lo, double hi);
  bool bernoulli(double p);
  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);
};

/// Counter-based stream: draw i is a pure function of (key, i), so a stream
/// can be re-created at any point from its path without replaying history.
class RngStream final : public RandomSource {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();
  double next_unit() override;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t position() const noexcept { return counter_; }

  /// Independent child stream named by `tag`.
  RngStream fork(std::string_view tag) const;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;
/// FNV-1a over bytes, then mixed.
std::uint64_t hash_string(std::string_view s) noexcept;

/// Stream for one (seed, dataset, epoch, sample index, stage) path. Identical
/// paths give identical streams; changing any component changes the key.
RngStream rng_for(std::uint64_t seed, std::string_view dataset_id,
                  std::uint64_t epoch, std::uint64_t index,
                  std::string_view stage);

}  // namespace trackaug
