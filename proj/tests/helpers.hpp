#pragma once

// Test-only utilities: a golden-section maximizer and random instance
// generators used as independent oracles. Nothing here may call into the
// solver's primal recovery.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "cemax/channel.hpp"
#include "cemax/model.hpp"

namespace testutil {

/// Golden-section maximization of a unimodal function on [lo, hi].
inline double golden_max(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc > fd ? c : d;
}

/// Random scenario with mt19937-driven sizes and gains; independent of the
/// library's counter generator on purpose.
inline cemax::Scenario random_scenario(std::uint32_t seed, std::size_t max_users = 3, std::size_t max_channels = 4) {
  std::mt19937 gen(seed);
  std::uniform_int_distribution<std::size_t> ku(1, max_users), nu(1, max_channels);
  std::exponential_distribution<double> exp1(1.0);
  std::uniform_real_distribution<double> wu(0.5, 2.0);

  cemax::Scenario s;
  const std::size_t K = ku(gen), N = nu(gen);
  s.system.num_subchannels = N;
  s.users.resize(K);
  for (auto& u : s.users) u.weight = wu(gen);
  s.gains = cemax::Matrix<double>(K, N);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t n = 0; n < N; ++n) s.gains(k, n) = 1e-4 * (exp1(gen) + 1e-6);
  }
  return s;
}

/// Random allocation honoring subchannel exclusivity; powers and
/// frequencies drawn inside the user's box constraints.
inline cemax::Allocation random_allocation(const cemax::Scenario& s, std::uint32_t seed) {
  std::mt19937 gen(seed);
  const std::size_t K = s.num_users(), N = s.num_subchannels();
  cemax::Allocation a = cemax::Allocation::zero(K, N);
  std::uniform_int_distribution<std::size_t> owner(0, K);  // K = unassigned
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t n = 0; n < N; ++n) {
    const std::size_t k = owner(gen);
    if (k == K) continue;
    a.assignment(k, n) = 1;
    const double cap = (s.users[k].max_power - s.system.circuit_power) / s.system.amplifier_coeff;
    a.power(k, n) = unit(gen) * cap * 0.5;
  }
  for (std::size_t k = 0; k < K; ++k) {
    a.cpu_freq[k] = unit(gen) * s.users[k].max_cpu_freq;
    a.mode[k] = unit(gen) < 0.5 ? 0 : 1;
  }
  return a;
}

}  // namespace testutil
