#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "cemax/errors.hpp"
#include "cemax/model.hpp"
#include "cemax/objective.hpp"
#include "cemax/solver_partial.hpp"

namespace cemax {

// Brute-force and KKT verification, deliberately simple and slow. The only
// code shared with the solvers is the objective module, so a disagreement
// here is a solver defect, not a shared bug.

struct GridSpec {
  int points = 200;  // grid points per decision dimension (0 is always added)
};

struct OracleResult {
  double weighted_sum_ce = 0.0;
  Allocation allocation;
  bool feasible = false;
};

namespace oracle_detail {

/// {0} followed by a log-spaced grid from hi*1e-6 to hi inclusive.
inline std::vector<double> log_grid_with_zero(double hi, int points) {
  std::vector<double> g{0.0};
  if (!(hi > 0.0) || points < 1) return g;
  if (points == 1) {
    g.push_back(hi);
    return g;
  }
  const double lo = hi * 1e-6;
  const double step = (std::log(hi) - std::log(lo)) / (points - 1);
  for (int i = 0; i < points; ++i) g.push_back(std::exp(std::log(lo) + i * step));
  g.back() = hi;
  return g;
}

/// Per-user exhaustive search over transmit powers on a fixed channel set
/// and the CPU frequency. Returns the best weighted CE and the argmax, or
/// feasible=false when no grid point satisfies the constraints.
struct UserBest {
  bool feasible = false;
  double weighted_ce = 0.0;
  std::vector<double> powers;  // aligned with the owned-channel list
  double freq = 0.0;
};

class UserSearch {
 public:
  UserSearch(const Scenario& s, std::size_t k, const std::vector<std::size_t>& owned,
             const std::vector<double>& p_grid, const std::vector<double>& f_grid, bool allow_local)
      : s_(s), k_(k), owned_(owned), p_grid_(p_grid), f_grid_(allow_local ? f_grid : std::vector<double>{0.0}) {
    rate_tab_.resize(owned.size());
    const SystemParams& sys = s.system;
    for (std::size_t j = 0; j < owned.size(); ++j) {
      rate_tab_[j].resize(p_grid_.size());
      const double h = s.gains(k, owned[j]);
      for (std::size_t i = 0; i < p_grid_.size(); ++i) {
        rate_tab_[j][i] = sys.bandwidth_per_subchannel * log2_strict(1.0 + p_grid_[i] * h / sys.noise_power);
      }
    }
  }

  UserBest run() {
    best_ = UserBest{};
    choice_.assign(owned_.size(), 0);
    descend(0, 0.0, 0.0);
    return best_;
  }

 private:
  void descend(std::size_t depth, double rate_tx, double p_tx) {
    if (depth == owned_.size()) {
      const UserParams& u = s_.users[k_];
      const SystemParams& sys = s_.system;
      for (double f : f_grid_) {
        const double rate = rate_tx + f / u.cycles_per_bit;
        const double power = sys.amplifier_coeff * p_tx + u.chip_coeff * f * f * f + sys.circuit_power;
        if (u.min_bits_rate - rate > kFeasTol) continue;
        if (power - u.max_power > kFeasTol) continue;
        const double wce = u.weight * rate / power;
        if (!best_.feasible || wce > best_.weighted_ce) {
          best_.feasible = true;
          best_.weighted_ce = wce;
          best_.powers.assign(choice_.size(), 0.0);
          for (std::size_t j = 0; j < choice_.size(); ++j) best_.powers[j] = p_grid_[choice_[j]];
          best_.freq = f;
        }
      }
      return;
    }
    for (std::size_t i = 0; i < p_grid_.size(); ++i) {
      choice_[depth] = i;
      descend(depth + 1, rate_tx + rate_tab_[depth][i], p_tx + p_grid_[i]);
    }
  }

  const Scenario& s_;
  std::size_t k_;
  const std::vector<std::size_t>& owned_;
  std::vector<double> p_grid_, f_grid_;
  std::vector<std::vector<double>> rate_tab_;
  std::vector<std::size_t> choice_;
  UserBest best_;
};

inline void check_size(const Scenario& s, const GridSpec& grid, int mode_combos) {
  const std::size_t K = s.num_users(), N = s.num_subchannels();
  if (K > 3 || N > 4) {
    throw Error(Errc::InstanceTooLarge, "brute force is limited to K <= 3, N <= 4");
  }
  // worst case: one user holds all N channels
  double worst = static_cast<double>(mode_combos) * std::pow(K + 1.0, static_cast<double>(N)) *
                 std::pow(grid.points + 1.0, static_cast<double>(N) + 1.0);
  if (worst > 2e10) {
    throw Error(Errc::InstanceTooLarge, "grid too fine for exhaustive search");
  }
}

/// Iterates every assignment of subchannels to {none, user 0, .., K-1},
/// restricted to users flagged eligible.
class AssignmentEnumerator {
 public:
  AssignmentEnumerator(std::size_t K, std::size_t N, const std::vector<std::uint8_t>& eligible)
      : K_(K), N_(N), eligible_(eligible), digits_(N, 0), done_(false) {}

  bool next(std::vector<std::size_t>& owner /* N entries, K == none */) {
    while (!done_) {
      bool ok = true;
      for (std::size_t n = 0; n < N_ && ok; ++n) {
        if (digits_[n] > 0 && !eligible_[digits_[n] - 1]) ok = false;
      }
      if (ok) {
        owner.assign(N_, K_);
        for (std::size_t n = 0; n < N_; ++n) {
          if (digits_[n] > 0) owner[n] = digits_[n] - 1;
        }
        advance();
        return true;
      }
      advance();
    }
    return false;
  }

 private:
  void advance() {
    for (std::size_t n = 0; n < N_; ++n) {
      if (++digits_[n] <= K_) return;
      digits_[n] = 0;
    }
    done_ = true;
  }

  std::size_t K_, N_;
  std::vector<std::uint8_t> eligible_;
  std::vector<std::size_t> digits_;
  bool done_;
};

inline OracleResult search_with_modes(const Scenario& s, const GridSpec& grid,
                                      const std::vector<std::uint8_t>& mode, OffloadMode eval_mode) {
  const std::size_t K = s.num_users(), N = s.num_subchannels();
  OracleResult best;
  best.allocation = Allocation::zero(K, N);

  std::vector<std::vector<double>> p_grids(K), f_grids(K);
  std::vector<std::uint8_t> may_transmit(K);
  for (std::size_t k = 0; k < K; ++k) {
    p_grids[k] = log_grid_with_zero(s.users[k].max_power, grid.points);
    f_grids[k] = log_grid_with_zero(s.users[k].max_cpu_freq, grid.points);
    may_transmit[k] = eval_mode == OffloadMode::partial || mode[k] == 1;
  }

  AssignmentEnumerator en(K, N, may_transmit);
  std::vector<std::size_t> owner;
  while (en.next(owner)) {
    double total = 0.0;
    bool ok = true;
    std::vector<UserBest> bests(K);
    for (std::size_t k = 0; k < K && ok; ++k) {
      std::vector<std::size_t> owned;
      for (std::size_t n = 0; n < N; ++n) {
        if (owner[n] == k) owned.push_back(n);
      }
      const bool allow_local = eval_mode == OffloadMode::partial || mode[k] == 0;
      bests[k] = UserSearch(s, k, owned, p_grids[k], f_grids[k], allow_local).run();
      if (!bests[k].feasible) {
        ok = false;
        break;
      }
      total += bests[k].weighted_ce;
    }
    if (!ok) continue;
    if (!best.feasible || total > best.weighted_sum_ce) {
      best.feasible = true;
      best.weighted_sum_ce = total;
      best.allocation = Allocation::zero(K, N);
      best.allocation.mode = mode;
      for (std::size_t k = 0; k < K; ++k) {
        std::size_t j = 0;
        for (std::size_t n = 0; n < N; ++n) {
          if (owner[n] == k) {
            best.allocation.assignment(k, n) = 1;
            best.allocation.power(k, n) = bests[k].powers[j++];
          }
        }
        best.allocation.cpu_freq[k] = bests[k].freq;
      }
    }
  }
  if (best.feasible) {
    // strip zero-power channel grants so the allocation invariants hold
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t n = 0; n < N; ++n) {
        if (best.allocation.assignment(k, n) && best.allocation.power(k, n) == 0.0) {
          best.allocation.assignment(k, n) = 0;
        }
      }
    }
    best.weighted_sum_ce = ce_report(s, best.allocation, eval_mode).weighted_sum_ce;
  }
  return best;
}

}  // namespace oracle_detail

/// Exhaustive search over integer assignments, per-channel power grids and
/// the frequency grid. K <= 3, N <= 4.
inline OracleResult brute_force_partial(const Scenario& s, const GridSpec& grid = {}) {
  ensure_valid(s);
  oracle_detail::check_size(s, grid, 1);
  std::vector<std::uint8_t> all_offload(s.num_users(), 1);
  return oracle_detail::search_with_modes(s, grid, all_offload, OffloadMode::partial);
}

/// Same, additionally enumerating the 2^K mode vectors.
inline OracleResult brute_force_binary(const Scenario& s, const GridSpec& grid = {}) {
  ensure_valid(s);
  const std::size_t K = s.num_users();
  oracle_detail::check_size(s, grid, 1 << K);
  OracleResult best;
  best.allocation = Allocation::zero(K, s.num_subchannels());
  for (std::uint32_t bits = 0; bits < (1u << K); ++bits) {
    std::vector<std::uint8_t> mode(K);
    for (std::size_t k = 0; k < K; ++k) mode[k] = (bits >> k) & 1u;
    auto r = oracle_detail::search_with_modes(s, grid, mode, OffloadMode::binary);
    if (r.feasible && (!best.feasible || r.weighted_sum_ce > best.weighted_sum_ce)) best = r;
  }
  return best;
}

// ---------------------------------------------------------------------------
// KKT verification

struct KktReport {
  double max_stationarity = 0.0;     // relative, over transmit powers and frequencies
  double max_complementarity = 0.0;  // multiplier * slack, relative to the objective scale
  double fixed_point_rate_residual = 0.0;
  double fixed_point_lambda_residual = 0.0;
};

/// Finite-difference stationarity of the dual Lagrangian in the powers and
/// frequencies of a returned solution, plus complementary slackness and the
/// parametric fixed-point residuals. Central differences, relative step.
inline KktReport kkt_residuals(const Scenario& s, const PartialSolution& sol, double fd_step_rel = 1e-6) {
  const std::size_t K = s.num_users(), N = s.num_subchannels();
  const bool binary = sol.mode == OffloadMode::binary;
  KktReport rep;

  std::vector<double> cr(K), cp(K);
  for (std::size_t k = 0; k < K; ++k) {
    const UserParams& u = s.users[k];
    if (binary) {
      cr[k] = sol.duals.psi[k] * u.weight + sol.duals.vartheta[k];
      cp[k] = sol.duals.psi[k] * sol.duals.phi[k] + sol.duals.chi[k];
    } else {
      cr[k] = sol.duals.lambda[k] * u.weight + sol.duals.alpha[k];
      cp[k] = sol.duals.lambda[k] * sol.duals.beta[k] + sol.duals.varsigma[k];
    }
  }
  const OffloadMode mode = sol.mode;

  Allocation a = sol.allocation;
  auto user_term = [&](std::size_t k) {
    return cr[k] * user_rate(s, a, k, mode) - cp[k] * (user_power(s, a, k, mode)) -
           sol.duals.upsilon[k] * a.cpu_freq[k];
  };

  // transmit powers
  for (std::size_t k = 0; k < K; ++k) {
    const bool transmitting = !binary || a.mode[k] == 1;
    if (!transmitting) continue;
    for (std::size_t n = 0; n < N; ++n) {
      if (!a.assignment(k, n)) continue;
      const double p = a.power(k, n);
      const double h = std::max(p * fd_step_rel, 1e-18);
      const double saved = p;
      a.power(k, n) = saved + h;
      const double up = user_term(k);
      a.power(k, n) = std::max(saved - h, 0.0);
      const double dn = user_term(k);
      a.power(k, n) = saved;
      const double grad = (up - dn) / (saved + h - std::max(saved - h, 0.0));
      // scale: magnitude of the two competing terms at this point
      const SystemParams& sys = s.system;
      const double dr = cr[k] * sys.bandwidth_per_subchannel * s.gains(k, n) /
                        (std::numbers::ln2 * (sys.noise_power + p * s.gains(k, n)));
      const double dp = cp[k] * sys.amplifier_coeff;
      const double scale = std::max(std::abs(dr) + std::abs(dp), 1e-300);
      const double res = p > 0.0 ? std::abs(grad) / scale : std::max(grad, 0.0) / scale;
      rep.max_stationarity = std::max(rep.max_stationarity, res);
    }
  }

  // frequencies
  for (std::size_t k = 0; k < K; ++k) {
    const UserParams& u = s.users[k];
    const bool computing = !binary || a.mode[k] == 0;
    if (!computing || u.max_cpu_freq <= 0.0) continue;
    const double f = a.cpu_freq[k];
    const double h = std::max(f * fd_step_rel, 1e-6 * std::max(u.max_cpu_freq, 1.0) * fd_step_rel);
    const double saved = f;
    a.cpu_freq[k] = saved + h;
    const double up = user_term(k);
    a.cpu_freq[k] = std::max(saved - h, 0.0);
    const double dn = user_term(k);
    a.cpu_freq[k] = saved;
    const double grad = (up - dn) / (saved + h - std::max(saved - h, 0.0));
    const double dr = cr[k] / u.cycles_per_bit;
    const double dp = 3.0 * cp[k] * u.chip_coeff * f * f + sol.duals.upsilon[k];
    const double scale = std::max(std::abs(dr) + std::abs(dp), 1e-300);
    const double res = f > 0.0 ? std::abs(grad) / scale : std::max(grad, 0.0) / scale;
    rep.max_stationarity = std::max(rep.max_stationarity, res);
  }

  // complementary slackness and the parametric fixed point
  for (std::size_t k = 0; k < K; ++k) {
    const UserParams& u = s.users[k];
    const double R = user_rate(s, a, k, mode);
    const double P = user_power(s, a, k, mode);
    const double obj_scale = std::max(std::abs(cr[k]) * R + std::abs(cp[k]) * P, 1e-300);
    const double alpha_k = binary ? sol.duals.vartheta[k] : sol.duals.alpha[k];
    const double sigma_k = binary ? sol.duals.chi[k] : sol.duals.varsigma[k];
    rep.max_complementarity =
        std::max(rep.max_complementarity, alpha_k * std::abs(R - u.min_bits_rate) / obj_scale);
    rep.max_complementarity =
        std::max(rep.max_complementarity, sigma_k * std::abs(u.max_power - P) / obj_scale);
    rep.max_complementarity =
        std::max(rep.max_complementarity, sol.duals.upsilon[k] * std::abs(u.max_cpu_freq - a.cpu_freq[k]) / obj_scale);

    const double lam = binary ? sol.duals.psi[k] : sol.duals.lambda[k];
    const double bet = binary ? sol.duals.phi[k] : sol.duals.beta[k];
    const double wr = u.weight * R;
    rep.fixed_point_rate_residual =
        std::max(rep.fixed_point_rate_residual, std::abs(wr - bet * P) / std::max(wr, 1e-300));
    rep.fixed_point_lambda_residual = std::max(rep.fixed_point_lambda_residual, std::abs(lam * P - 1.0));
  }
  return rep;
}

}  // namespace cemax
