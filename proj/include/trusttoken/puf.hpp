// Copyright ttsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRUSTTOKEN_PUF_HPP
#define TRUSTTOKEN_PUF_HPP

#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "trusttoken/bits.hpp"
#include "trusttoken/errors.hpp"
#include "trusttoken/rng.hpp"

namespace trusttoken {

/// Parameters of the simulated ring-oscillator PUF. Each response bit
/// consumes a disjoint oscillator pair, hence oscillator_count must equal
/// 2 * response_width. Defaults describe the 512-oscillator / 256-bit /
/// 2-byte-challenge device used everywhere else in the simulator.
///
/// sigma_process is the fractional std-dev of per-oscillator frequency
/// (manufacturing variation); sigma_noise the fractional std-dev of
/// per-evaluation jitter. The operating regime keeps sigma_noise well below
/// sigma_process; degenerate settings (either zero, or noise above process)
/// are accepted so tests can probe the failure modes.
struct PufConfig {
  uint32_t oscillator_count = 512;
  uint32_t response_width = 256;
  uint32_t challenge_width = 16;  // bits
  double nominal_frequency = 100e6;
  double sigma_process = 0.01;
  double sigma_noise = 0.0001;

  void validate() const {
    if (oscillator_count == 0 || response_width == 0) {
      throw ConfigError("PufConfig: oscillator_count and response_width must be positive");
    }
    if (oscillator_count != 2 * response_width) {
      throw ConfigError("PufConfig: oscillator_count must equal 2 * response_width");
    }
    if (challenge_width == 0 || challenge_width > 64) {
      throw ConfigError("PufConfig: challenge_width must be in [1, 64]");
    }
    if (!(nominal_frequency > 0.0)) {
      throw ConfigError("PufConfig: nominal_frequency must be positive");
    }
    if (sigma_process < 0.0 || sigma_noise < 0.0) {
      throw ConfigError("PufConfig: sigmas must be non-negative");
    }
  }

  uint64_t challenge_mask() const {
    return challenge_width >= 64 ? ~uint64_t{0}
                                 : (uint64_t{1} << challenge_width) - 1;
  }

  /// Number of distinct challenges; saturates at 2^63 for width 64.
  uint64_t challenge_space() const {
    return challenge_width >= 64 ? ~uint64_t{0}
                                 : uint64_t{1} << challenge_width;
  }

  bool operator==(const PufConfig&) const = default;
};

struct PufChallenge {
  uint64_t value = 0;
  auto operator<=>(const PufChallenge&) const = default;
};

/// One simulated device: the per-oscillator frequencies embodying its
/// process variation. Regenerating from the same (seed, config) yields an
/// identical array.
struct OscillatorArray {
  uint64_t device_id = 0;  // the seed doubles as the device identity
  uint64_t seed = 0;
  std::vector<double> frequencies;
};

using PufResponse = BitString;
using PairMap = std::vector<std::pair<uint32_t, uint32_t>>;

struct PufQualityReport {
  double uniqueness = 0.0;
  double uniformity = 0.0;
  double reliability = 0.0;
  std::vector<double> pairwise_hd;  // one entry per device pair per challenge
  uint32_t device_count = 0;
  uint32_t trial_count = 0;
};

namespace detail {
inline void check_challenge(PufChallenge challenge, const PufConfig& config) {
  if (challenge.value > config.challenge_mask()) {
    throw ConfigError("challenge value does not fit in " +
                      std::to_string(config.challenge_width) + " bits");
  }
}
}  // namespace detail

/// Maps a challenge to response_width disjoint oscillator pairs: a
/// Fisher-Yates shuffle of 0..oscillator_count-1 seeded by the challenge,
/// consumed as consecutive pairs. Deterministic in (challenge, config);
/// distinct challenges give distinct permutations with overwhelming
/// probability.
inline PairMap derive_pair_map(PufChallenge challenge,
                               const PufConfig& config) {
  config.validate();
  detail::check_challenge(challenge, config);

  std::vector<uint32_t> perm(config.oscillator_count);
  std::iota(perm.begin(), perm.end(), 0u);
  Rng rng(derive_seed(challenge.value, seed_domain::kPairMap));
  for (size_t i = perm.size() - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng.next_below(i + 1)]);
  }

  PairMap pairs;
  pairs.reserve(config.response_width);
  for (uint32_t k = 0; k < config.response_width; ++k) {
    pairs.emplace_back(perm[2 * k], perm[2 * k + 1]);
  }
  return pairs;
}

/// Draws a device: frequencies[i] = nominal * (1 + g_i) with g_i Gaussian of
/// std-dev sigma_process. A draw that would leave a frequency non-positive is
/// redrawn from the same stream, so frequencies stay strictly positive.
inline OscillatorArray new_device(uint64_t seed, const PufConfig& config) {
  config.validate();
  OscillatorArray device;
  device.device_id = seed;
  device.seed = seed;
  device.frequencies.resize(config.oscillator_count);
  Rng rng(seed);
  for (auto& f : device.frequencies) {
    double multiplier = 1.0;
    if (config.sigma_process > 0.0) {
      do {
        multiplier = 1.0 + config.sigma_process * rng.next_gaussian();
      } while (multiplier <= 0.0);
    }
    f = config.nominal_frequency * multiplier;
  }
  return device;
}

/// Evaluates a response over an explicit pair map. Bit k is 1 iff the first
/// oscillator of pair k runs faster than the second after per-evaluation
/// jitter; an exact tie yields 0. With sigma_noise == 0 the result is a pure
/// function of (device, pairs) and ignores noise_seed entirely.
inline PufResponse evaluate_with_pairs(const OscillatorArray& device,
                                       const PairMap& pairs,
                                       uint64_t noise_seed,
                                       const PufConfig& config) {
  config.validate();
  if (device.frequencies.size() != config.oscillator_count) {
    throw DimensionError("evaluate: device has " +
                         std::to_string(device.frequencies.size()) +
                         " oscillators, config expects " +
                         std::to_string(config.oscillator_count));
  }

  std::vector<double> jitter;
  if (config.sigma_noise > 0.0) {
    jitter.resize(config.oscillator_count);
    Rng rng(noise_seed);
    for (auto& n : jitter) n = config.sigma_noise * rng.next_gaussian();
  }

  PufResponse response(config.response_width);
  for (size_t k = 0; k < pairs.size(); ++k) {
    const auto [a, b] = pairs[k];
    double fa = device.frequencies[a];
    double fb = device.frequencies[b];
    if (!jitter.empty()) {
      fa *= 1.0 + jitter[a];
      fb *= 1.0 + jitter[b];
    }
    if (fa > fb) response.set(k, true);
  }
  return response;
}

inline PufResponse evaluate(const OscillatorArray& device,
                            PufChallenge challenge, uint64_t noise_seed,
                            const PufConfig& config) {
  return evaluate_with_pairs(device, derive_pair_map(challenge, config),
                             noise_seed, config);
}

/// Noiseless reference evaluation, used for provisioning and as the
/// reliability baseline.
inline PufResponse evaluate_noiseless(const OscillatorArray& device,
                                      PufChallenge challenge,
                                      const PufConfig& config) {
  PufConfig quiet = config;
  quiet.sigma_noise = 0.0;
  return evaluate(device, challenge, 0, quiet);
}

/// Mean pairwise inter-device Hamming distance fraction for responses to one
/// challenge. Ideal is 0.5.
inline double uniqueness(const std::vector<PufResponse>& responses) {
  if (responses.size() < 2) {
    throw InsufficientDataError("uniqueness needs at least 2 responses");
  }
  if (responses.front().empty()) {
    throw DimensionError("uniqueness over zero-width responses");
  }
  double sum = 0.0;
  size_t pairs = 0;
  for (size_t i = 0; i < responses.size(); ++i) {
    for (size_t j = i + 1; j < responses.size(); ++j) {
      sum += static_cast<double>(hamming_distance(responses[i], responses[j])) /
             static_cast<double>(responses[i].size());
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

/// Fraction of 1-bits. Ideal is 0.5.
inline double uniformity(const PufResponse& response) {
  if (response.empty()) return 0.0;
  return static_cast<double>(response.count_ones()) /
         static_cast<double>(response.size());
}

/// 1 minus the mean trial-vs-reference Hamming distance fraction over noisy
/// re-evaluations. Trial i uses noise seed derive_seed(noise_seed_base,
/// kNoise, i); the reference is the noiseless response.
inline double reliability(const OscillatorArray& device,
                          PufChallenge challenge, uint32_t trials,
                          const PufConfig& config,
                          uint64_t noise_seed_base = 0) {
  if (trials < 2) {
    throw InsufficientDataError("reliability needs at least 2 trials");
  }
  const PairMap pairs = derive_pair_map(challenge, config);
  const PufResponse reference =
      evaluate_with_pairs(device, pairs, 0, [&] {
        PufConfig quiet = config;
        quiet.sigma_noise = 0.0;
        return quiet;
      }());

  double hd_sum = 0.0;
  for (uint32_t t = 0; t < trials; ++t) {
    const PufResponse trial = evaluate_with_pairs(
        device, pairs, derive_seed(noise_seed_base, seed_domain::kNoise, t),
        config);
    hd_sum += static_cast<double>(hamming_distance(reference, trial)) /
              static_cast<double>(reference.size());
  }
  return 1.0 - hd_sum / static_cast<double>(trials);
}

/// Full population characterization with explicit device seeds. pairwise_hd
/// holds device_count*(device_count-1)/2 entries per challenge, in
/// (challenge, i, j) order. Deterministic in all seeds.
inline PufQualityReport quality_report(
    const std::vector<uint64_t>& device_seeds,
    const std::vector<PufChallenge>& challenges, uint32_t trials,
    uint64_t base_seed, const PufConfig& config) {
  config.validate();
  if (device_seeds.size() < 2) {
    throw InsufficientDataError("quality_report needs at least 2 devices");
  }
  if (challenges.empty()) {
    throw InsufficientDataError("quality_report needs at least 1 challenge");
  }
  if (trials < 2) {
    throw InsufficientDataError("quality_report needs at least 2 trials");
  }

  std::vector<OscillatorArray> devices;
  devices.reserve(device_seeds.size());
  for (uint64_t s : device_seeds) devices.push_back(new_device(s, config));

  PufQualityReport report;
  report.device_count = static_cast<uint32_t>(devices.size());
  report.trial_count = trials;

  double uniformity_sum = 0.0;
  double reliability_sum = 0.0;
  for (size_t c = 0; c < challenges.size(); ++c) {
    std::vector<PufResponse> responses;
    responses.reserve(devices.size());
    for (const auto& dev : devices) {
      responses.push_back(evaluate_noiseless(dev, challenges[c], config));
      uniformity_sum += uniformity(responses.back());
    }
    for (size_t i = 0; i < responses.size(); ++i) {
      for (size_t j = i + 1; j < responses.size(); ++j) {
        report.pairwise_hd.push_back(
            static_cast<double>(hamming_distance(responses[i], responses[j])) /
            static_cast<double>(config.response_width));
      }
    }
    for (size_t d = 0; d < devices.size(); ++d) {
      reliability_sum += reliability(
          devices[d], challenges[c], trials, config,
          derive_seed(base_seed, seed_domain::kReliability,
                      d * challenges.size() + c));
    }
  }

  const double samples =
      static_cast<double>(devices.size() * challenges.size());
  report.uniformity = uniformity_sum / samples;
  report.reliability = reliability_sum / samples;
  report.uniqueness =
      std::accumulate(report.pairwise_hd.begin(), report.pairwise_hd.end(),
                      0.0) /
      static_cast<double>(report.pairwise_hd.size());
  return report;
}

/// Convenience overload: device d uses seed derive_seed(base_seed, kDevice, d).
inline PufQualityReport quality_report(
    uint32_t n_devices, const std::vector<PufChallenge>& challenges,
    uint32_t trials, uint64_t base_seed, const PufConfig& config) {
  std::vector<uint64_t> seeds;
  seeds.reserve(n_devices);
  for (uint32_t d = 0; d < n_devices; ++d) {
    seeds.push_back(derive_seed(base_seed, seed_domain::kDevice, d));
  }
  return quality_report(seeds, challenges, trials, base_seed, config);
}

}  // namespace trusttoken

#endif  // TRUSTTOKEN_PUF_HPP
