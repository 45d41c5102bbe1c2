#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cemax/solver_binary.hpp"
#include "cemax/solver_partial.hpp"

namespace cemax {

// The four comparison schemes. All return the same PartialSolution shape as
// the proposed solver so reports and sweeps are uniform.

/// CE maximization with local computing disabled: the parametric solver
/// with the CPU path switched off.
inline PartialSolution solve_offloading_only(const Scenario& s, const SolverConfig& cfg = {}) {
  return detail::solve_parametric(s, cfg, /*allow_local=*/false, "offload-only");
}

/// Local computing only. The per-user ratio (f/C)/(eps f^3 + p_c) is
/// unimodal with stationary point f* = (p_c / (2 eps))^(1/3); the optimum
/// on the feasible interval is that point clamped to it.
inline PartialSolution solve_local_only(const Scenario& s, const SolverConfig& cfg = {}) {
  ensure_valid(s);
  cfg.validate();
  const std::size_t K = s.num_users(), N = s.num_subchannels();
  const SystemParams& sys = s.system;

  PartialSolution sol;
  sol.scheme = "local-only";
  sol.mode = OffloadMode::partial;
  sol.allocation = Allocation::zero(K, N);
  sol.duals = DualState::zero(K, N);

  for (std::size_t k = 0; k < K; ++k) {
    const UserParams& u = s.users[k];
    const double f_required = u.min_bits_rate * u.cycles_per_bit;
    const double f_budget = std::cbrt((u.max_power - sys.circuit_power) / u.chip_coeff);
    const double f_hi = std::min(u.max_cpu_freq, f_budget);
    if (f_required > f_hi * (1.0 + 1e-15)) {
      throw Error(Errc::InfeasibleInstance,
                  "user " + std::to_string(k) + " cannot meet its minimum rate by local computing");
    }
    const double f_star = std::cbrt(sys.circuit_power / (2.0 * u.chip_coeff));
    sol.allocation.cpu_freq[k] = std::clamp(f_star, f_required, f_hi);
    sol.allocation.mode[k] = 0;
  }

  sol.report = ce_report(s, sol.allocation, OffloadMode::partial);
  for (std::size_t k = 0; k < K; ++k) {
    sol.duals.lambda[k] = 1.0 / sol.report.per_user_power[k];
    sol.duals.beta[k] = s.users[k].weight * sol.report.per_user_ce[k];
  }
  sol.converged = true;
  sol.outer_iterations = 1;

  IterationRecord rec;
  rec.outer = 0;
  rec.weighted_sum_ce = sol.report.weighted_sum_ce;
  rec.lambda = sol.duals.lambda;
  rec.beta = sol.duals.beta;
  sol.trace.records.push_back(std::move(rec));
  return sol;
}

namespace detail {

/// Shared assembly for the two single-metric schemes: one inner solve at
/// fixed objective prices, no parametric loop.
inline PartialSolution solve_single_metric(const Scenario& s, const SolverConfig& cfg,
                                           const std::vector<double>& base_rate,
                                           const std::vector<double>& base_power, const std::string& scheme,
                                           const std::vector<double>& record_lambda,
                                           const std::vector<double>& record_beta) {
  ensure_valid(s);
  cfg.validate();
  check_rate_reachable(s);
  const std::size_t K = s.num_users(), N = s.num_subchannels();

  auto inner = InnerSolver(s, InnerOptions::uniform(K, base_rate, base_power), cfg).run();

  PartialSolution sol;
  sol.scheme = scheme;
  sol.mode = OffloadMode::partial;
  sol.allocation = inner.alloc;
  sol.report = ce_report(s, sol.allocation, OffloadMode::partial);
  sol.duals = DualState::zero(K, N);
  sol.duals.lambda = record_lambda;
  sol.duals.beta = record_beta;
  sol.duals.alpha = inner.alpha;
  sol.duals.varsigma = inner.varsigma;
  sol.duals.upsilon = inner.upsilon;
  sol.duals.xi = inner.xi;
  sol.converged = inner.converged;
  sol.status = inner.converged ? SolveStatus::ok : SolveStatus::max_iters_exceeded;
  sol.outer_iterations = 1;

  IterationRecord rec;
  rec.outer = 0;
  rec.inner = inner.iterations;
  rec.weighted_sum_ce = sol.report.weighted_sum_ce;
  rec.max_rate_violation = inner.max_rate_violation;
  rec.max_power_violation = inner.max_power_violation;
  rec.lambda = record_lambda;
  rec.beta = record_beta;
  sol.trace.records.push_back(std::move(rec));
  return sol;
}

}  // namespace detail

/// Computation-bits maximization: max sum_k w_k R_k under the same
/// constraints. Rate is monotone in both power and frequency, so the power
/// budget is always spent; the budget multiplier sets the water level.
inline PartialSolution solve_cb_max(const Scenario& s, const SolverConfig& cfg = {}) {
  const std::size_t K = s.num_users();
  std::vector<double> br(K), bp(K, 0.0), one(K, 1.0), zero(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) br[k] = s.users[k].weight;
  return detail::solve_single_metric(s, cfg, br, bp, "cb-max", one, zero);
}

/// Energy-consumption minimization: min sum_k P_k subject to the rate
/// requirement. The per-user rate multiplier prices bits; spending stops
/// the moment the requirement is met.
inline PartialSolution solve_ec_min(const Scenario& s, const SolverConfig& cfg = {}) {
  const std::size_t K = s.num_users();
  std::vector<double> br(K, 0.0), bp(K, 1.0), zero(K, 0.0);
  return detail::solve_single_metric(s, cfg, br, bp, "ec-min", zero, zero);
}

namespace detail {

/// Binary-mode variant of a single-metric scheme: a hypothetical pass
/// scores both branches at the scheme's prices, modes are fixed by the
/// comparison, and a committed pass re-solves under the masks.
inline PartialSolution solve_single_metric_binary(const Scenario& s, const SolverConfig& cfg,
                                                  const std::vector<double>& base_rate,
                                                  const std::vector<double>& base_power, const std::string& scheme) {
  ensure_valid(s);
  cfg.validate();
  const std::size_t K = s.num_users(), N = s.num_subchannels();
  const auto branch = branch_feasibility(s);
  for (std::size_t k = 0; k < K; ++k) {
    if (!branch.offload_ok[k] && !branch.local_ok[k]) {
      throw Error(Errc::InfeasibleInstance,
                  "user " + std::to_string(k) + " cannot reach its minimum rate in either mode");
    }
  }

  auto hypo = InnerSolver(s, InnerOptions::uniform(K, base_rate, base_power), cfg).run();
  std::vector<std::uint8_t> mode(K);
  for (std::size_t k = 0; k < K; ++k) {
    const UserParams& u = s.users[k];
    const double cr = base_rate[k] + hypo.alpha[k];
    const double cp = base_power[k] + hypo.varsigma[k];
    const double f = hypo.alloc.cpu_freq[k];
    const double off = cr * offload_rate(s, hypo.alloc, k) -
                       cp * (transmit_power(s, hypo.alloc, k) + s.system.circuit_power);
    const double loc = cr * f / u.cycles_per_bit - cp * (u.chip_coeff * f * f * f + s.system.circuit_power);
    mode[k] = select_mode(off, loc);
    if (mode[k] == 1 && !branch.offload_ok[k]) mode[k] = 0;
    if (mode[k] == 0 && !branch.local_ok[k]) mode[k] = 1;
  }

  InnerOptions opt = InnerOptions::uniform(K, base_rate, base_power);
  for (std::size_t k = 0; k < K; ++k) {
    opt.can_transmit[k] = mode[k];
    opt.can_compute[k] = mode[k] ? 0 : 1;
  }
  auto committed = InnerSolver(s, opt, cfg).run();
  committed.alloc.mode = mode;

  PartialSolution sol;
  sol.scheme = scheme;
  sol.mode = OffloadMode::binary;
  sol.allocation = committed.alloc;
  sol.report = ce_report(s, sol.allocation, OffloadMode::binary);
  sol.duals = DualState::zero(K, N);
  sol.duals.vartheta = committed.alpha;
  sol.duals.chi = committed.varsigma;
  sol.duals.upsilon = committed.upsilon;
  sol.duals.xi = committed.xi;
  sol.converged = committed.converged;
  sol.status = committed.converged ? SolveStatus::ok : SolveStatus::max_iters_exceeded;
  sol.outer_iterations = 1;

  IterationRecord rec;
  rec.outer = 0;
  rec.inner = committed.iterations;
  rec.weighted_sum_ce = sol.report.weighted_sum_ce;
  rec.lambda.assign(K, 0.0);
  rec.beta.assign(K, 0.0);
  sol.trace.records.push_back(std::move(rec));
  return sol;
}

}  // namespace detail

/// cb-max / ec-min with the binary-mode restriction applied; the
/// offloading-only and local-only baselines are already pure modes.
inline PartialSolution solve_cb_max_binary(const Scenario& s, const SolverConfig& cfg = {}) {
  const std::size_t K = s.num_users();
  std::vector<double> br(K), bp(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) br[k] = s.users[k].weight;
  return detail::solve_single_metric_binary(s, cfg, br, bp, "cb-max");
}

inline PartialSolution solve_ec_min_binary(const Scenario& s, const SolverConfig& cfg = {}) {
  const std::size_t K = s.num_users();
  std::vector<double> br(K, 0.0), bp(K, 1.0);
  return detail::solve_single_metric_binary(s, cfg, br, bp, "ec-min");
}

}  // namespace cemax
