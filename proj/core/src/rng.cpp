// SPDX-License-Identifier: Apache-2.0

#include "trackaug/rng.hpp"

#include <algorithm>
#include <cmath>

#include "trackaug/error.hpp"

namespace trackaug {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t combine(std::uint64_t h, std::uint64_t v) noexcept {
  return mix64(h ^ (mix64(v) + kGolden + (h << 6) + (h >> 2)));
}
}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t hash_string(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return mix64(h ^ s.size());
}

double RandomSource::uniform(double lo, double hi) {
  if (lo == hi) return lo;
  return lo + next_unit() * (hi - lo);
}

bool RandomSource::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return next_unit() < p;
}

std::size_t RandomSource::index(std::size_t n) {
  require(n > 0, "index(): empty range");
  if (n == 1) return 0;
  const auto i = static_cast<std::size_t>(std::floor(next_unit() * static_cast<double>(n)));
  return std::min(i, n - 1);
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RngStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

RngStream RngStream::fork(std::string_view tag) const {
  return RngStream(combine(key_, hash_string(tag)));
}

RngStream rng_for(std::uint64_t seed, std::string_view dataset_id,
                  std::uint64_t epoch, std::uint64_t index,
                  std::string_view stage) {
  std::uint64_t h = mix64(seed ^ 0x5851F42D4C957F2DULL);
  h = combine(h, hash_string(dataset_id));
  h = combine(h, epoch);
  h = combine(h, index);
  h = combine(h, hash_string(stage));
  return RngStream(h);
}

}  // namespace trackaug
