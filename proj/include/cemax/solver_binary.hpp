#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cemax/solver_partial.hpp"

namespace cemax {

// Binary offloading: each user's task runs entirely at the edge server
// (mode 1) or entirely on the local CPU (mode 0). The parametric machinery
// is the partial-mode one; the extra step is the per-user mode decision,
// made each outer iteration by comparing the price-weighted net value of
// the two branches at the current hypothetical allocation. The final
// refinement searches channel assignments directly: a user holding
// subchannels offloads, a user holding none computes locally, and every
// candidate is scored by the exact per-user CE optimum of its branch.

struct ModeIndicators {
  double offload = 0.0;  // net branch value when transmitting
  double local = 0.0;    // net branch value when computing locally
};

/// Branch scores of user k at the binary-mode multipliers (psi, phi,
/// vartheta, chi): rate value minus energy cost of each branch, both
/// including the unconditional circuit power.
inline ModeIndicators mode_indicators(const Scenario& s, const DualState& d, const Allocation& a, std::size_t k) {
  detail::check_user_index(s, k);
  const UserParams& u = s.users[k];
  const double cr = d.psi[k] * u.weight + d.vartheta[k];
  const double cp = d.psi[k] * d.phi[k] + d.chi[k];
  const double f = a.cpu_freq[k];
  ModeIndicators m;
  m.offload = cr * offload_rate(s, a, k) - cp * (transmit_power(s, a, k) + s.system.circuit_power);
  m.local = cr * f / u.cycles_per_bit - cp * (u.chip_coeff * f * f * f + s.system.circuit_power);
  return m;
}

/// Offload wins ties.
inline std::uint8_t select_mode(double offload_value, double local_value) {
  return offload_value >= local_value ? 1 : 0;
}

namespace detail {

struct BranchFeasibility {
  std::vector<std::uint8_t> offload_ok, local_ok;
};

inline BranchFeasibility branch_feasibility(const Scenario& s) {
  const std::size_t K = s.num_users();
  BranchFeasibility b;
  b.offload_ok.resize(K);
  b.local_ok.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const UserParams& u = s.users[k];
    b.offload_ok[k] = max_rate_bound(s, k, /*include_local=*/false) >= u.min_bits_rate;
    b.local_ok[k] = u.max_cpu_freq / u.cycles_per_bit >= u.min_bits_rate;
  }
  return b;
}

/// One binary-mode inner solve at fixed (psi, phi): a hypothetical pass
/// with both paths open scores the branches, the mode comparison fixes the
/// flags, and a committed pass re-solves under the masks. A user stranded
/// below its requirement switches branch if the other one can carry it.
inline ParametricState solve_binary_at(const Scenario& s, const SolverConfig& cfg, const BranchFeasibility& branch,
                                       const std::vector<double>& psi, const std::vector<double>& phi) {
  const std::size_t K = s.num_users(), N = s.num_subchannels();
  std::vector<double> br(K), bp(K);
  for (std::size_t k = 0; k < K; ++k) {
    br[k] = psi[k] * s.users[k].weight;
    bp[k] = psi[k] * phi[k];
  }

  InnerOptions hypo_opt = InnerOptions::uniform(K, br, bp);
  hypo_opt.thorough = false;
  auto hypo = InnerSolver(s, hypo_opt, cfg).run();
  DualState hd = DualState::zero(K, N);
  hd.psi = psi;
  hd.phi = phi;
  hd.vartheta = hypo.alpha;
  hd.chi = hypo.varsigma;

  std::vector<std::uint8_t> mode(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto ind = mode_indicators(s, hd, hypo.alloc, k);
    mode[k] = select_mode(ind.offload, ind.local);
    if (mode[k] == 1 && !branch.offload_ok[k]) mode[k] = 0;
    if (mode[k] == 0 && !branch.local_ok[k]) mode[k] = 1;
  }

  auto run_committed = [&](const std::vector<std::uint8_t>& m) {
    InnerOptions opt = InnerOptions::uniform(K, br, bp);
    opt.thorough = false;
    for (std::size_t k = 0; k < K; ++k) {
      opt.can_transmit[k] = m[k];
      opt.can_compute[k] = m[k] ? 0 : 1;
    }
    auto r = InnerSolver(s, opt, cfg).run();
    r.alloc.mode = m;
    return r;
  };

  auto committed = run_committed(mode);
  bool flipped = false;
  for (std::size_t k = 0; k < K; ++k) {
    if (s.users[k].min_bits_rate - committed.rate[k] > kFeasTol) {
      const std::uint8_t other = mode[k] ? 0 : 1;
      if ((other == 1 && branch.offload_ok[k]) || (other == 0 && branch.local_ok[k])) {
        mode[k] = other;
        flipped = true;
      }
    }
  }
  if (flipped) committed = run_committed(mode);

  ParametricState st;
  st.rate.resize(K);
  st.power.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    st.rate[k] = user_rate_binary(s, committed.alloc, k);
    st.power[k] = user_power_binary(s, committed.alloc, k);
    st.weighted_sum_ce += s.users[k].weight * st.rate[k] / st.power[k];
  }
  st.inner = std::move(committed);
  return st;
}

}  // namespace detail

/// Weighted-sum CE maximization under binary offloading.
inline PartialSolution solve_binary(const Scenario& s, const SolverConfig& cfg = {}) {
  ensure_valid(s);
  cfg.validate();
  const std::size_t K = s.num_users(), N = s.num_subchannels();
  const auto branch = detail::branch_feasibility(s);
  for (std::size_t k = 0; k < K; ++k) {
    if (!branch.offload_ok[k] && !branch.local_ok[k]) {
      throw Error(Errc::InfeasibleInstance,
                  "user " + std::to_string(k) + " cannot reach its minimum rate in either mode");
    }
  }

  auto solve_at = [&](const std::vector<double>& psi, const std::vector<double>& phi) {
    return detail::solve_binary_at(s, cfg, branch, psi, phi);
  };
  detail::ParametricOutcome o = detail::parametric_fixed_point(s, cfg, solve_at);

  // Exact refinement over channel assignments: holding subchannels means
  // offloading, holding none means local computing, and each user's branch
  // value is its exact constrained CE optimum.
  std::vector<std::uint8_t> all(K, 1), none(K, 0);
  detail::UserFitter offload_fitter(s, all, none);
  detail::UserFitter local_fitter(s, none, all);
  auto score = [&](std::size_t k, const std::vector<std::size_t>& owned) {
    return owned.empty() ? local_fitter.solo_ce(k, owned) : offload_fitter.solo_ce(k, owned);
  };

  std::vector<std::vector<std::size_t>> seeds;
  {
    std::vector<std::size_t> loop_owner(N, K);
    for (std::size_t n = 0; n < N; ++n) {
      for (std::size_t k = 0; k < K; ++k) {
        if (o.state.inner.alloc.assignment(k, n)) loop_owner[n] = k;
      }
    }
    seeds.push_back(std::move(loop_owner));
    detail::InnerOptions opt =
        detail::InnerOptions::uniform(K, std::vector<double>(K, 1.0), std::vector<double>(K, 0.0));
    seeds.push_back(detail::InnerSolver(s, opt, cfg).gain_argmax_owners());
    seeds.emplace_back(N, K);
  }
  detail::CeVertex vertex = detail::CeVertexSearch(s, score, all).run(seeds);

  // materialize: offloaders from the offload fitter, locals from the local one
  PartialSolution sol;
  sol.scheme = "proposed-binary";
  sol.mode = OffloadMode::binary;
  sol.allocation = Allocation::zero(K, N);
  sol.duals = DualState::zero(K, N);
  for (std::size_t n = 0; n < N; ++n) {
    if (vertex.owner[n] < K) sol.allocation.assignment(vertex.owner[n], n) = 1;
  }
  std::vector<double> cr(K), cp(K);
  for (std::size_t k = 0; k < K; ++k) {
    const UserParams& u = s.users[k];
    const detail::SoloCe& solo = vertex.solo[k];
    bool offloads = false;
    for (std::size_t n = 0; n < N; ++n) offloads = offloads || sol.allocation.assignment(k, n);
    sol.allocation.mode[k] = offloads ? 1 : 0;

    const double psi = 1.0 / std::max(solo.fit.power, 1e-300);
    const double phi = u.weight * solo.eta;
    const double vartheta = psi * u.weight * solo.fit.alpha;
    const double chi = psi * u.weight * solo.fit.sigma;
    sol.duals.psi[k] = psi;
    sol.duals.phi[k] = phi;
    sol.duals.vartheta[k] = vartheta;
    sol.duals.chi[k] = chi;
    cr[k] = psi * u.weight + vartheta;
    cp[k] = psi * phi + chi;

    const detail::UserFitter& f = offloads ? offload_fitter : local_fitter;
    const double cr0 = 1.0 + solo.fit.alpha;
    const double cp0 = solo.eta + solo.fit.sigma;
    for (std::size_t n = 0; n < N; ++n) {
      if (sol.allocation.assignment(k, n)) {
        sol.allocation.power(k, n) = f.candidate_power(k, n, cr0, cp0);
        if (sol.allocation.power(k, n) == 0.0) sol.allocation.assignment(k, n) = 0;
      }
    }
    sol.allocation.cpu_freq[k] = offloads ? 0.0 : f.frequency(k, cr0, cp0).first;
    if (!offloads && u.max_cpu_freq > 0.0 && sol.allocation.cpu_freq[k] >= u.max_cpu_freq * (1.0 - 1e-12)) {
      sol.duals.upsilon[k] =
          std::max(0.0, cr[k] / u.cycles_per_bit - 3.0 * cp[k] * u.chip_coeff * u.max_cpu_freq * u.max_cpu_freq);
    }
  }
  for (std::size_t n = 0; n < N; ++n) {
    if (vertex.owner[n] >= K) continue;
    double best = 0.0, second = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double h =
          channel_indicator(cr[k], s.system, offload_fitter.candidate_power(k, n, cr[k], cp[k]), s.gains(k, n));
      if (h > best) {
        second = best;
        best = h;
      } else {
        second = std::max(second, h);
      }
    }
    sol.duals.xi[n] = std::max(0.0, second);
  }

  sol.report = ce_report(s, sol.allocation, OffloadMode::binary);
  for (std::size_t k = 0; k < K; ++k) {
    sol.duals.psi[k] = 1.0 / sol.report.per_user_power[k];
    sol.duals.phi[k] = s.users[k].weight * sol.report.per_user_ce[k];
  }

  sol.trace = std::move(o.trace);
  sol.outer_iterations = o.outer_iterations;
  double res = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double wr = s.users[k].weight * sol.report.per_user_rate[k];
    res = std::max(res, std::abs(wr - sol.duals.phi[k] * sol.report.per_user_power[k]) / std::max(wr, 1e-300));
    res = std::max(res, std::abs(sol.duals.psi[k] * sol.report.per_user_power[k] - 1.0));
  }
  sol.converged = vertex.infeasible_users == 0 && res < cfg.outer_tol && sol.report.feasible.all();
  sol.status = sol.converged ? SolveStatus::ok : SolveStatus::max_iters_exceeded;

  IterationRecord final_rec;
  final_rec.outer = o.outer_iterations;
  final_rec.weighted_sum_ce = sol.report.weighted_sum_ce;
  final_rec.fixed_point_residual = res;
  final_rec.lambda = sol.duals.psi;
  final_rec.beta = sol.duals.phi;
  sol.trace.records.push_back(std::move(final_rec));
  return sol;
}

}  // namespace cemax
