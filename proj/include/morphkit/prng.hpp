// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace morphkit {

/// splitmix64. The same bit stream on every platform is a hard requirement:
/// variant generation, name allocation and junk placement all key off it.
class SplitMix64 {
 public:
  SplitMix64() = default;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state() const { return state_; }

  /// Uniform in [0, n). Modulo bias is irrelevant here; determinism is not.
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

  /// Uniform double in [0, 1), 53 significant bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return uniform() < p; }

  std::int32_t next_i32() { return static_cast<std::int32_t>(next() >> 32); }

  /// Child stream; advances this stream by one draw.
  SplitMix64 split() { return SplitMix64(next()); }

 private:
  std::uint64_t state_ = 0;
};

/// Stream seed for variant i of a run seeded with `seed`: one splitmix64 step
/// applied to (seed XOR (i+1)*golden). Variants are independently
/// reproducible from (seed, i) alone.
inline std::uint64_t variant_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed ^ ((index + 1) * 0x9E3779B97F4A7C15ull));
  return g.next();
}

}  // namespace morphkit
