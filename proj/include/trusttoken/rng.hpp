// Copyright ttsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRUSTTOKEN_RNG_HPP
#define TRUSTTOKEN_RNG_HPP

#include <cmath>
#include <cstdint>

namespace trusttoken {

/// SplitMix64 (Steele/Lea/Flood). Every random quantity in the simulator is
/// drawn from streams seeded explicitly through this generator, so a run is
/// a pure function of its seeds. Standard-library distributions are avoided
/// on purpose: their output is implementation-defined and would break
/// byte-identical reports.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(uint64_t seed) : state_(seed) {}

  constexpr uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  uint64_t state_;
};

/// One-shot avalanche mix of a 64-bit value.
constexpr uint64_t mix64(uint64_t x) { return SplitMix64(x).next(); }

/// Domain tags for deriving independent sub-streams from one master seed.
namespace seed_domain {
inline constexpr uint64_t kDevice = 0xD0E5A11C0DE00001ULL;
inline constexpr uint64_t kNoise = 0xD0E5A11C0DE00002ULL;
inline constexpr uint64_t kChallenge = 0xD0E5A11C0DE00003ULL;
inline constexpr uint64_t kPairMap = 0xD0E5A11C0DE00004ULL;
inline constexpr uint64_t kProvision = 0xD0E5A11C0DE00005ULL;
inline constexpr uint64_t kScenarioDevice = 0xD0E5A11C0DE00006ULL;
inline constexpr uint64_t kScenarioProvision = 0xD0E5A11C0DE00007ULL;
inline constexpr uint64_t kScenarioGarbage = 0xD0E5A11C0DE00008ULL;
inline constexpr uint64_t kReliability = 0xD0E5A11C0DE00009ULL;
inline constexpr uint64_t kTrngStub = 0xD0E5A11C0DE0000AULL;
}  // namespace seed_domain

/// Derives a child seed from (base, domain, index). Two avalanche rounds so
/// that related inputs land in unrelated streams.
constexpr uint64_t derive_seed(uint64_t base, uint64_t domain,
                               uint64_t index = 0) {
  return mix64(mix64(base ^ domain) + index);
}

/// Deterministic source of uniforms, bounded integers and Gaussians.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_.next(); }

  /// Uniform double in [0, 1), 53 mantissa bits.
  double next_unit() {
    return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n), rejection sampled so the result is unbiased.
  uint64_t next_below(uint64_t n) {
    const uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const uint64_t r = gen_.next();
      if (r >= threshold) return r % n;
    }
  }

  /// Standard normal via the Marsaglia polar method. Uses only sqrt/log so
  /// the stream stays reproducible.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_unit() - 1.0;
      v = 2.0 * next_unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

 private:
  SplitMix64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace trusttoken

#endif  // TRUSTTOKEN_RNG_HPP
