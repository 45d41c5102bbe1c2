#pragma once

#include <cstdint>

#include "cemax/errors.hpp"
#include "cemax/model.hpp"
#include "cemax/rng.hpp"

namespace cemax {

/// Rayleigh-fading channel model: amplitude Rayleigh, hence power gain
/// exponential. mean_gain folds the average path loss into the fading mean.
struct ChannelConfig {
  double mean_gain = 1e-4;
  std::int64_t rng_seed = 1;
};

/// Draws a K-by-N matrix of independent exponential power gains with the
/// configured mean. Identical (cfg, K, N) always yields a bit-identical
/// matrix; see rng.hpp for the fixed generator.
inline Matrix<double> sample_gains(const ChannelConfig& cfg, std::size_t K, std::size_t N) {
  if (!(cfg.mean_gain > 0.0)) {
    throw Error(Errc::NonPositiveParameter, "channel.mean_gain must be > 0");
  }
  if (K == 0 || N == 0) {
    throw Error(Errc::ZeroDimension, "gain matrix dimensions must be >= 1");
  }
  Matrix<double> g(K, N);
  const auto seed = static_cast<std::uint64_t>(cfg.rng_seed);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t n = 0; n < N; ++n) {
      g(k, n) = cfg.mean_gain * unit_exponential(seed, k, n);
    }
  }
  return g;
}

/// Baseline experiment scenario: OFDMA uplink with identical users and a
/// seeded Rayleigh realization. Callers adjust fields afterwards for sweeps.
inline Scenario make_default_scenario(std::size_t K = 2, std::size_t N = 4, std::int64_t seed = 1,
                                      double mean_gain = 1e-4) {
  Scenario s;
  s.system.num_subchannels = N;
  s.users.assign(K, UserParams{});
  s.rng_seed = seed;
  s.gains = sample_gains(ChannelConfig{mean_gain, seed}, K, N);
  return s;
}

}  // namespace cemax
