// Copyright 2026 The vormc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace vormc {

// PCG32 (XSH-RR) with an explicit stream selector. The pair (seed, stream)
// fully determines the sequence, and distinct streams are independent
// sequences, so each replication or pixel gets its own stream.
class Rng {
 public:
  Rng() : Rng(0, 0) {}
  Rng(std::uint64_t seed, std::uint64_t stream) { set_sequence(seed, stream); }

  void set_sequence(std::uint64_t seed, std::uint64_t stream) {
    seed_ = seed;
    stream_ = stream;
    state_ = 0u;
    inc_ = (mix(stream ^ 0x9e3779b97f4a7c15ULL) << 1u) | 1u;
    next_u32();
    state_ += mix(seed);
    next_u32();
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Independent generator for sub-stream `index` of this generator's seed.
  Rng split(std::uint64_t index) const {
    return Rng(seed_, mix(stream_ * 0x100000001b3ULL + index + 1));
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 0x5851f42d4c957f2dULL + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((~rot + 1u) & 31));
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  // SplitMix64 finalizer; decorrelates nearby seeds and stream ids.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_ = 0, stream_ = 0;
  std::uint64_t state_ = 0, inc_ = 1;
};

}  // namespace vormc
