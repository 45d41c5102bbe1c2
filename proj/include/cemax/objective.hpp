#pragma once

#include <cmath>
#include <numbers>

#include "cemax/errors.hpp"
#include "cemax/model.hpp"

namespace cemax {

// Single source of truth for rates, powers, computation efficiency and
// feasibility. Both the solvers and the verification oracle evaluate
// through these functions, so they can never disagree about what an
// allocation is worth.

enum class OffloadMode { partial, binary };

/// Constraint g <= 0 counts as satisfied iff g <= kFeasTol in native units.
inline constexpr double kFeasTol = 1e-9;

/// log2 fixed as ln(x)/ln(2); no fast-math anywhere in this project.
inline double log2_strict(double x) { return std::log(x) / std::numbers::ln2; }

namespace detail {
inline void check_user_index(const Scenario& s, std::size_t k) {
  if (k >= s.num_users()) {
    throw Error(Errc::IndexOutOfRange, "user index " + std::to_string(k) + " out of range");
  }
}
}  // namespace detail

/// Offloading rate share of user k: sum over held subchannels of
/// B*log2(1 + p*h/N0), in bits/s.
inline double offload_rate(const Scenario& s, const Allocation& a, std::size_t k) {
  const SystemParams& sys = s.system;
  double r = 0.0;
  for (std::size_t n = 0; n < s.num_subchannels(); ++n) {
    if (a.assignment(k, n)) {
      r += sys.bandwidth_per_subchannel * log2_strict(1.0 + a.power(k, n) * s.gains(k, n) / sys.noise_power);
    }
  }
  return r;
}

/// Amplifier-side transmit power of user k: zeta * sum of held powers, in W.
inline double transmit_power(const Scenario& s, const Allocation& a, std::size_t k) {
  double p = 0.0;
  for (std::size_t n = 0; n < s.num_subchannels(); ++n) {
    if (a.assignment(k, n)) p += a.power(k, n);
  }
  return s.system.amplifier_coeff * p;
}

inline double user_rate_partial(const Scenario& s, const Allocation& a, std::size_t k) {
  detail::check_user_index(s, k);
  return offload_rate(s, a, k) + a.cpu_freq[k] / s.users[k].cycles_per_bit;
}

inline double user_power_partial(const Scenario& s, const Allocation& a, std::size_t k) {
  detail::check_user_index(s, k);
  const double f = a.cpu_freq[k];
  return transmit_power(s, a, k) + s.users[k].chip_coeff * f * f * f + s.system.circuit_power;
}

namespace detail {
inline double binary_flag(const Allocation& a, std::size_t k) {
  if (a.mode[k] > 1) {
    throw Error(Errc::NonBinaryMode, "mode flag must be 0 or 1 for user " + std::to_string(k));
  }
  return static_cast<double>(a.mode[k]);
}
}  // namespace detail

/// Binary-mode rate: the offload term if the user offloads, the local term
/// otherwise. The unused branch is masked out, not required to be zero.
inline double user_rate_binary(const Scenario& s, const Allocation& a, std::size_t k) {
  detail::check_user_index(s, k);
  const double mu = detail::binary_flag(a, k);
  return mu * offload_rate(s, a, k) + (1.0 - mu) * a.cpu_freq[k] / s.users[k].cycles_per_bit;
}

/// Binary-mode power; the circuit term is paid in either mode.
inline double user_power_binary(const Scenario& s, const Allocation& a, std::size_t k) {
  detail::check_user_index(s, k);
  const double mu = detail::binary_flag(a, k);
  const double f = a.cpu_freq[k];
  return mu * transmit_power(s, a, k) + (1.0 - mu) * s.users[k].chip_coeff * f * f * f + s.system.circuit_power;
}

inline double user_rate(const Scenario& s, const Allocation& a, std::size_t k, OffloadMode mode) {
  return mode == OffloadMode::partial ? user_rate_partial(s, a, k) : user_rate_binary(s, a, k);
}

inline double user_power(const Scenario& s, const Allocation& a, std::size_t k, OffloadMode mode) {
  return mode == OffloadMode::partial ? user_power_partial(s, a, k) : user_power_binary(s, a, k);
}

/// Full evaluation of an allocation: per-user rate/power/CE, the weighted
/// sum, and per-constraint-group feasibility. Infeasibility is reported,
/// never thrown.
inline CeReport ce_report(const Scenario& s, const Allocation& a, OffloadMode mode) {
  const std::size_t K = s.num_users(), N = s.num_subchannels();
  CeReport rep;
  rep.per_user_rate.resize(K);
  rep.per_user_power.resize(K);
  rep.per_user_ce.resize(K);

  for (std::size_t k = 0; k < K; ++k) {
    const UserParams& u = s.users[k];
    const double R = user_rate(s, a, k, mode);
    const double P = user_power(s, a, k, mode);
    rep.per_user_rate[k] = R;
    rep.per_user_power[k] = P;
    rep.per_user_ce[k] = P > 0.0 ? R / P : 0.0;
    rep.weighted_sum_ce += u.weight * rep.per_user_ce[k];

    if (u.min_bits_rate - R > kFeasTol) rep.feasible.min_rate = false;
    if (P - u.max_power > kFeasTol) rep.feasible.max_power = false;
    if (a.cpu_freq[k] < -kFeasTol || a.cpu_freq[k] - u.max_cpu_freq > kFeasTol) rep.feasible.cpu_freq = false;
    if (mode == OffloadMode::binary && a.mode[k] > 1) rep.feasible.binary_modes = false;
  }
  for (std::size_t n = 0; n < N; ++n) {
    int held = 0;
    for (std::size_t k = 0; k < K; ++k) {
      if (a.assignment(k, n) > 1) rep.feasible.exclusivity = false;
      held += a.assignment(k, n) ? 1 : 0;
    }
    if (held > 1) rep.feasible.exclusivity = false;
  }
  return rep;
}

}  // namespace cemax
