#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cemax/errors.hpp"
#include "cemax/matrix.hpp"

namespace cemax {

// All quantities are base SI: watts, hertz, seconds, bits, cycles.
// Unit conversion happens at config parse time, never inside solvers.

/// System-wide constants of the OFDMA uplink.
struct SystemParams {
  double bandwidth_per_subchannel = 2e6;  // Hz
  double block_duration = 1.0;            // s
  std::size_t num_subchannels = 4;
  double noise_power = 1e-9;               // W per subchannel
  double amplifier_coeff = 3.0;            // dimensionless
  double circuit_power = 0.05;             // W
};

/// Per-user task and hardware parameters.
struct UserParams {
  double weight = 1.0;            // relative priority in the weighted sum
  double cycles_per_bit = 1e3;    // CPU cycles to process one bit
  double chip_coeff = 1e-24;      // J*s^2/cycle^3, CPU energy model coefficient
  double max_cpu_freq = 1e8;      // cycles/s
  double min_bits_rate = 2e4;     // bits/s, minimum computation requirement
  double max_power = 3.0;         // W, total power cap
};

/// A fully specified problem instance: system constants, users, and the
/// K-by-N channel power gain matrix.
struct Scenario {
  SystemParams system;
  std::vector<UserParams> users;
  Matrix<double> gains;  // gains(k, n) > 0
  std::int64_t rng_seed = 1;

  std::size_t num_users() const { return users.size(); }
  std::size_t num_subchannels() const { return system.num_subchannels; }
};

/// A candidate resource allocation. Powers are meaningful only where the
/// assignment is 1; cpu_freq is the local computing frequency; mode is the
/// per-user offload flag (1 = offload, 0 = local), ignored in partial mode.
struct Allocation {
  Matrix<std::uint8_t> assignment;  // K x N, one user per subchannel at most
  Matrix<double> power;             // K x N transmit powers, W
  std::vector<double> cpu_freq;     // cycles/s
  std::vector<std::uint8_t> mode;   // 1 = offload, 0 = local

  static Allocation zero(std::size_t K, std::size_t N) {
    Allocation a;
    a.assignment = Matrix<std::uint8_t>(K, N, 0);
    a.power = Matrix<double>(K, N, 0.0);
    a.cpu_freq.assign(K, 0.0);
    a.mode.assign(K, 1);
    return a;
  }
};

/// Lagrange multipliers and the parametric pair driving the solvers.
/// lambda/beta are the sum-of-ratios parameters for partial mode, psi/phi
/// their binary-mode analogues. alpha prices the minimum-rate constraint,
/// varsigma the power cap, upsilon the CPU frequency cap, xi subchannel
/// exclusivity; vartheta/chi are the binary-mode rate/power multipliers.
struct DualState {
  std::vector<double> lambda, beta;
  std::vector<double> upsilon, alpha, varsigma;
  std::vector<double> xi;
  std::vector<double> psi, phi, vartheta, chi;

  static DualState zero(std::size_t K, std::size_t N) {
    DualState d;
    d.lambda.assign(K, 0.0);
    d.beta.assign(K, 0.0);
    d.upsilon.assign(K, 0.0);
    d.alpha.assign(K, 0.0);
    d.varsigma.assign(K, 0.0);
    d.xi.assign(N, 0.0);
    d.psi.assign(K, 0.0);
    d.phi.assign(K, 0.0);
    d.vartheta.assign(K, 0.0);
    d.chi.assign(K, 0.0);
    return d;
  }
};

/// Per-constraint-group feasibility verdicts for an evaluated allocation.
struct FeasibilityFlags {
  bool min_rate = true;      // R_k >= R_k^th for all users
  bool max_power = true;     // P_k <= P_k^th for all users
  bool cpu_freq = true;      // 0 <= f_k <= f_k^max
  bool exclusivity = true;   // at most one user per subchannel, binary entries
  bool binary_modes = true;  // mode flags in {0,1} (binary mode only)

  bool all() const { return min_rate && max_power && cpu_freq && exclusivity && binary_modes; }
};

/// Rates, powers and computation efficiencies of an allocation.
struct CeReport {
  std::vector<double> per_user_rate;   // bits/s
  std::vector<double> per_user_power;  // W
  std::vector<double> per_user_ce;     // bits/J
  double weighted_sum_ce = 0.0;        // bits/J
  FeasibilityFlags feasible;
};

/// One row of a solve trace: the state after an outer iteration.
struct IterationRecord {
  int outer = 0;
  int inner = 0;
  double weighted_sum_ce = 0.0;
  double fixed_point_residual = 0.0;  // max of the two parametric residuals
  double max_rate_violation = 0.0;    // relative, over users
  double max_power_violation = 0.0;   // relative, over users
  std::vector<double> lambda, beta;   // parametric pair snapshot
};

struct SolveTrace {
  std::vector<IterationRecord> records;
};

inline std::string field_name(const char* base, std::size_t idx) {
  return std::string(base) + "[" + std::to_string(idx) + "]";
}

/// Checks every type invariant and returns the complete list of violations.
/// An empty result means the scenario is valid as-is.
inline std::vector<Violation> validate_scenario(const Scenario& s) {
  std::vector<Violation> out;
  auto positive = [&out](double v, const std::string& field) {
    if (!(v > 0.0)) {
      out.push_back({Errc::NonPositiveParameter, field, "must be strictly positive, got " + std::to_string(v)});
    }
  };

  positive(s.system.bandwidth_per_subchannel, "system.bandwidth_per_subchannel");
  positive(s.system.block_duration, "system.block_duration");
  positive(s.system.noise_power, "system.noise_power");
  positive(s.system.amplifier_coeff, "system.amplifier_coeff");
  positive(s.system.circuit_power, "system.circuit_power");
  if (s.system.num_subchannels < 1) {
    out.push_back({Errc::NonPositiveParameter, "system.num_subchannels", "must be >= 1"});
  }

  if (s.users.empty()) {
    out.push_back({Errc::EmptyUserSet, "users", "at least one user required"});
  }
  for (std::size_t k = 0; k < s.users.size(); ++k) {
    const UserParams& u = s.users[k];
    positive(u.weight, field_name("users.weight", k));
    if (!(u.cycles_per_bit >= 1.0)) {
      out.push_back({Errc::NonPositiveParameter, field_name("users.cycles_per_bit", k), "must be >= 1"});
    }
    positive(u.chip_coeff, field_name("users.chip_coeff", k));
    if (!(u.max_cpu_freq >= 0.0)) {
      out.push_back({Errc::NonPositiveParameter, field_name("users.max_cpu_freq", k), "must be >= 0"});
    }
    if (!(u.min_bits_rate >= 0.0)) {
      out.push_back({Errc::NonPositiveParameter, field_name("users.min_bits_rate", k), "must be >= 0"});
    }
    if (!(u.max_power > s.system.circuit_power)) {
      out.push_back({Errc::NonPositiveParameter, field_name("users.max_power", k),
                     "must exceed circuit power " + std::to_string(s.system.circuit_power)});
    }
  }

  if (s.gains.rows() != s.users.size() || s.gains.cols() != s.system.num_subchannels) {
    out.push_back({Errc::GainMatrixShapeMismatch, "gains",
                   "expected " + std::to_string(s.users.size()) + "x" + std::to_string(s.system.num_subchannels) +
                       ", got " + std::to_string(s.gains.rows()) + "x" + std::to_string(s.gains.cols())});
  } else {
    for (std::size_t k = 0; k < s.gains.rows(); ++k) {
      for (std::size_t n = 0; n < s.gains.cols(); ++n) {
        if (!(s.gains(k, n) > 0.0)) {
          out.push_back({Errc::NonPositiveParameter, "gains[" + std::to_string(k) + "][" + std::to_string(n) + "]",
                         "channel gain must be strictly positive"});
          // one violation per offending entry is enough detail
        }
      }
    }
  }
  return out;
}

/// Throws Error(listing every violation) unless the scenario is valid.
inline const Scenario& ensure_valid(const Scenario& s) {
  auto vs = validate_scenario(s);
  if (!vs.empty()) {
    throw Error(vs.front().code, join_violations(vs));
  }
  return s;
}

/// Structural sanity of an allocation against a scenario (shape, exclusivity,
/// power-implies-assignment, frequency range). Used by tests and the oracle.
inline std::vector<Violation> validate_allocation(const Scenario& s, const Allocation& a) {
  std::vector<Violation> out;
  const std::size_t K = s.num_users(), N = s.num_subchannels();
  if (a.assignment.rows() != K || a.assignment.cols() != N || a.power.rows() != K || a.power.cols() != N ||
      a.cpu_freq.size() != K || a.mode.size() != K) {
    out.push_back({Errc::GainMatrixShapeMismatch, "allocation", "shape does not match scenario"});
    return out;
  }
  for (std::size_t n = 0; n < N; ++n) {
    int users_on = 0;
    for (std::size_t k = 0; k < K; ++k) {
      if (a.assignment(k, n) > 1) {
        out.push_back({Errc::NonBinaryMode, "assignment", "entries must be 0 or 1"});
      }
      users_on += a.assignment(k, n) ? 1 : 0;
      if (a.power(k, n) > 0.0 && !a.assignment(k, n)) {
        out.push_back({Errc::NonPositiveParameter, "power[" + std::to_string(k) + "][" + std::to_string(n) + "]",
                       "positive power on unassigned subchannel"});
      }
    }
    if (users_on > 1) {
      out.push_back({Errc::NonPositiveParameter, "assignment[:][" + std::to_string(n) + "]",
                     "subchannel held by more than one user"});
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (a.cpu_freq[k] < 0.0 || a.cpu_freq[k] > s.users[k].max_cpu_freq * (1.0 + 1e-12)) {
      out.push_back({Errc::NonPositiveParameter, field_name("cpu_freq", k), "outside [0, max_cpu_freq]"});
    }
  }
  return out;
}

}  // namespace cemax
