#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "cemax/baselines.hpp"
#include "cemax/solver_binary.hpp"
#include "cemax/solver_partial.hpp"
#include "cemax/units.hpp"

namespace cemax {

// Experiment sweeps: the same channel realization is solved by every scheme
// at each point of a parameter grid, so the curves are comparable. Points
// run in parallel; rows are emitted in sweep order regardless of completion
// order.

enum class Scheme { proposed_partial, proposed_binary, offload_only, local_only, cb_max, ec_min };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::proposed_partial: return "proposed-partial";
    case Scheme::proposed_binary: return "proposed-binary";
    case Scheme::offload_only: return "offload-only";
    case Scheme::local_only: return "local-only";
    case Scheme::cb_max: return "cb-max";
    case Scheme::ec_min: return "ec-min";
  }
  return "?";
}

inline std::vector<Scheme> all_schemes() {
  return {Scheme::proposed_partial, Scheme::proposed_binary, Scheme::offload_only,
          Scheme::local_only,       Scheme::cb_max,          Scheme::ec_min};
}

/// Runs one scheme; baseline_binary switches the single-metric baselines to
/// their binary-mode variants (offload-only and local-only are already pure
/// modes).
inline PartialSolution run_scheme(const Scenario& s, const SolverConfig& cfg, Scheme scheme,
                                  bool baseline_binary = false) {
  switch (scheme) {
    case Scheme::proposed_partial: return solve_partial(s, cfg);
    case Scheme::proposed_binary: return solve_binary(s, cfg);
    case Scheme::offload_only: return solve_offloading_only(s, cfg);
    case Scheme::local_only: return solve_local_only(s, cfg);
    case Scheme::cb_max: return baseline_binary ? solve_cb_max_binary(s, cfg) : solve_cb_max(s, cfg);
    case Scheme::ec_min: return baseline_binary ? solve_ec_min_binary(s, cfg) : solve_ec_min(s, cfg);
  }
  throw Error(Errc::ConfigParseError, "unknown scheme");
}

struct SweepRow {
  double value = 0.0;
  Scheme scheme = Scheme::proposed_partial;
  double weighted_sum_ce = std::numeric_limits<double>::quiet_NaN();
  double sum_rate = std::numeric_limits<double>::quiet_NaN();
  double sum_power = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  int iters = 0;
  bool feasible = false;
};

enum class SweepParam { pth, rth };

inline const char* sweep_param_name(SweepParam p) { return p == SweepParam::pth ? "pth" : "rth"; }

namespace sweep_detail {

inline SweepRow run_point(Scenario s, const SolverConfig& cfg, SweepParam param, double value, Scheme scheme,
                          bool baseline_binary) {
  for (UserParams& u : s.users) {
    (param == SweepParam::pth ? u.max_power : u.min_bits_rate) = value;
  }
  SweepRow row;
  row.value = value;
  row.scheme = scheme;
  try {
    PartialSolution sol = run_scheme(s, cfg, scheme, baseline_binary);
    row.weighted_sum_ce = sol.report.weighted_sum_ce;
    row.sum_rate = 0.0;
    row.sum_power = 0.0;
    for (std::size_t k = 0; k < s.num_users(); ++k) {
      row.sum_rate += sol.report.per_user_rate[k];
      row.sum_power += sol.report.per_user_power[k];
    }
    row.converged = sol.converged;
    row.iters = sol.outer_iterations;
    row.feasible = true;
  } catch (const Error& e) {
    if (e.code() != Errc::InfeasibleInstance) throw;
  }
  return row;
}

}  // namespace sweep_detail

/// One row per sweep point per scheme, in sweep order. Points run in
/// parallel on a worker pool; the output order is fixed by the row index,
/// not by completion order. The sweep value overwrites the swept field for
/// every user.
inline std::vector<SweepRow> run_sweep(const Scenario& base, const SolverConfig& cfg, SweepParam param, double from,
                                       double to, int steps, const std::vector<Scheme>& schemes,
                                       bool baseline_binary = false) {
  if (steps < 2) throw Error(Errc::ConfigParseError, "sweep needs at least 2 steps");
  if (!(from > 0.0) || !(to > 0.0)) throw Error(Errc::ConfigParseError, "sweep bounds must be positive");
  std::vector<double> values(steps);
  for (int i = 0; i < steps; ++i) values[i] = from + (to - from) * i / (steps - 1);

  std::vector<SweepRow> rows(values.size() * schemes.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= rows.size()) return;
      try {
        rows[i] = sweep_detail::run_point(base, cfg, param, values[i / schemes.size()], schemes[i % schemes.size()],
                                          baseline_binary);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t pool_size =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), rows.size());
  std::vector<std::thread> pool;
  pool.reserve(pool_size);
  for (std::size_t t = 0; t < pool_size; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

/// Per-iteration convergence table for every requested scheme on one
/// scenario (sweep value column carries the outer iteration index).
inline std::vector<SweepRow> convergence_rows(const Scenario& s, const SolverConfig& cfg,
                                              const std::vector<Scheme>& schemes, bool baseline_binary = false) {
  std::vector<SweepRow> rows;
  for (Scheme sch : schemes) {
    try {
      PartialSolution sol = run_scheme(s, cfg, sch, baseline_binary);
      double sum_rate = 0.0, sum_power = 0.0;
      for (std::size_t k = 0; k < s.num_users(); ++k) {
        sum_rate += sol.report.per_user_rate[k];
        sum_power += sol.report.per_user_power[k];
      }
      for (const IterationRecord& r : sol.trace.records) {
        SweepRow row;
        row.value = r.outer;
        row.scheme = sch;
        row.weighted_sum_ce = r.weighted_sum_ce;
        row.sum_rate = sum_rate;
        row.sum_power = sum_power;
        row.converged = sol.converged;
        row.iters = sol.outer_iterations;
        row.feasible = true;
        rows.push_back(row);
      }
    } catch (const Error& e) {
      if (e.code() != Errc::InfeasibleInstance) throw;
      SweepRow row;
      row.scheme = sch;
      rows.push_back(row);
    }
  }
  return rows;
}

/// CSV rendering; header row mandatory, floats at 12 significant digits.
inline std::string sweep_to_csv(const std::vector<SweepRow>& rows, const std::string& param_name) {
  std::string out = "sweep_param,sweep_value,scheme,weighted_sum_ce,sum_rate,sum_power,converged,iters\n";
  for (const SweepRow& r : rows) {
    out += param_name;
    out += ',';
    out += format_sig12(r.value);
    out += ',';
    out += scheme_name(r.scheme);
    out += ',';
    out += format_sig12(r.weighted_sum_ce);
    out += ',';
    out += format_sig12(r.sum_rate);
    out += ',';
    out += format_sig12(r.sum_power);
    out += ',';
    out += r.converged ? '1' : '0';
    out += ',';
    out += std::to_string(r.iters);
    out += '\n';
  }
  return out;
}

/// A safe upper end for minimum-rate sweeps: every user granted its best
/// floor(N/K) subchannels with the budget split evenly is jointly feasible,
/// so a fraction of the worst such bound stays solvable at every point.
inline double rth_sweep_upper_bound(const Scenario& s, double margin = 0.8) {
  const std::size_t K = s.num_users(), N = s.num_subchannels();
  const std::size_t share = std::max<std::size_t>(1, N / K);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < K; ++k) {
    const UserParams& u = s.users[k];
    std::vector<double> gains;
    for (std::size_t n = 0; n < N; ++n) gains.push_back(s.gains(k, n));
    std::sort(gains.rbegin(), gains.rend());
    const double p_each = (u.max_power - s.system.circuit_power) / (s.system.amplifier_coeff * share);
    double r = 0.0;
    for (std::size_t j = 0; j < share && j < gains.size(); ++j) {
      r += s.system.bandwidth_per_subchannel * log2_strict(1.0 + p_each * gains[j] / s.system.noise_power);
    }
    worst = std::min(worst, r);
  }
  return margin * worst;
}

}  // namespace cemax
