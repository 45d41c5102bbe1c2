#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "cemax/errors.hpp"
#include "cemax/model.hpp"
#include "cemax/objective.hpp"

namespace cemax {

// Weighted-sum computation-efficiency maximization for the partial
// offloading mode.
//
// The sum of per-user rate/power ratios is handled with a parametric
// reformulation: an outer loop drives the per-user pair (lambda_k, beta_k)
// toward the fixed point lambda = 1/P, beta = w*R/P, and for each pair the
// linearized problem
//     max sum_k lambda_k (w_k R_k - beta_k P_k)   s.t. C1..C5
// is solved by dual decomposition: closed-form water-filling powers, a
// closed-form CPU frequency, and a per-subchannel score whose argmax yields
// the assignment.
//
// The linearized objective is nearly flat across assignments close to the
// fixed point, so the loop alone can stall on contended instances. The
// solver therefore finishes with an exact refinement that exploits the
// separable structure: once the subchannel assignment is fixed, the
// weighted-sum CE decomposes into independent per-user ratio problems, each
// solved to machine precision by a per-user parametric iteration over a
// convex subproblem. Assignments are compared by those exact optima in a
// deterministic exchange search, and the returned multipliers are rebuilt
// from the winning vertex so the fixed-point identities hold at the
// solution.

struct SolverConfig {
  double outer_tol = 1e-4;    // relative change threshold for the weighted-sum CE
  double inner_tol = 1e-6;    // dual residual threshold for the inner loop
  int max_outer_iters = 50;
  int max_inner_iters = 200;
  double step0 = 1.0;         // initial subgradient step
  double step_decay = 0.6;    // diminishing step exponent
  double damping = 0.7;       // largest (lambda, beta) step; backtracked when needed

  void validate() const {
    if (!(outer_tol > 0.0) || !(inner_tol > 0.0)) {
      throw Error(Errc::NonPositiveParameter, "solver tolerances must be > 0");
    }
    if (max_outer_iters < 1 || max_inner_iters < 1) {
      throw Error(Errc::NonPositiveParameter, "iteration caps must be >= 1");
    }
    if (!(damping > 0.0 && damping <= 1.0)) {
      throw Error(Errc::NonPositiveParameter, "damping must be in (0, 1]");
    }
    if (!(step0 > 0.0) || !(step_decay >= 0.0)) {
      throw Error(Errc::NonPositiveParameter, "step parameters must be positive");
    }
  }
};

enum class SolveStatus { ok, max_iters_exceeded };

struct PartialSolution {
  Allocation allocation;
  CeReport report;
  DualState duals;
  SolveTrace trace;
  bool converged = false;
  SolveStatus status = SolveStatus::ok;
  int outer_iterations = 0;
  std::string scheme;
  OffloadMode mode = OffloadMode::partial;
};

// ---------------------------------------------------------------------------
// Closed forms

/// Water-filling transmit power for one subchannel: the dual-determined
/// level minus the channel floor N0/h, clipped at zero. rate_price is the
/// marginal value of a bit/s, power_price the marginal cost of a watt.
inline double waterfill_power(double rate_price, double power_price, const SystemParams& sys, double gain) {
  if (!(power_price > 0.0)) {
    throw Error(Errc::DegenerateDual, "power price must be positive");
  }
  if (rate_price <= 0.0) return 0.0;
  const double level =
      rate_price * sys.bandwidth_per_subchannel / (std::numbers::ln2 * sys.amplifier_coeff * power_price);
  const double p = level - sys.noise_power / gain;
  return p > 0.0 ? p : 0.0;
}

/// Gain threshold below which the water-filling power is exactly zero.
inline double activation_threshold(double rate_price, double power_price, const SystemParams& sys) {
  if (rate_price <= 0.0) return std::numeric_limits<double>::infinity();
  return sys.noise_power * std::numbers::ln2 * sys.amplifier_coeff * power_price /
         (rate_price * sys.bandwidth_per_subchannel);
}

namespace detail {
/// Per-user dual prices. alpha adds to the rate side (a user short of its
/// minimum rate bids more per bit), varsigma to the power side.
inline double rate_price(const DualState& d, std::size_t k, const UserParams& u) {
  return d.lambda[k] * u.weight + d.alpha[k];
}
inline double power_price(const DualState& d, std::size_t k) {
  return d.lambda[k] * d.beta[k] + d.varsigma[k];
}
}  // namespace detail

/// Optimal transmit power of user k on a subchannel with the given gain,
/// at the current multipliers.
inline double optimal_power(const DualState& d, std::size_t k, const UserParams& u, const SystemParams& sys,
                            double gain) {
  return waterfill_power(detail::rate_price(d, k, u), detail::power_price(d, k), sys, gain);
}

/// Optimal local CPU frequency of user k at the current multipliers,
/// clamped to [0, max_cpu_freq].
inline double optimal_frequency(const DualState& d, std::size_t k, const UserParams& u) {
  const double cp = detail::power_price(d, k);
  if (!(cp > 0.0)) {
    throw Error(Errc::DegenerateDual, "power price must be positive");
  }
  const double bracket = detail::rate_price(d, k, u) / u.cycles_per_bit - d.upsilon[k];
  if (bracket <= 0.0) return 0.0;
  const double f = std::sqrt(bracket / (3.0 * cp * u.chip_coeff));
  return std::min(f, u.max_cpu_freq);
}

/// Subchannel score: marginal value of handing the subchannel to a user
/// that would transmit z watts on it. Zero at z = 0, strictly positive for
/// z > 0 when the rate price is positive.
inline double channel_indicator(double rate_price, const SystemParams& sys, double z, double gain) {
  if (z <= 0.0 || rate_price == 0.0) return 0.0;
  const double x = z * gain / sys.noise_power;
  const double g = log2_strict(1.0 + x) - x / (std::numbers::ln2 * (1.0 + x));
  return rate_price * sys.bandwidth_per_subchannel * g;
}

inline double channel_indicator(const DualState& d, std::size_t k, const UserParams& u, const SystemParams& sys,
                                double z, double gain) {
  return channel_indicator(detail::rate_price(d, k, u), sys, z, gain);
}

/// Each subchannel goes to the user with the largest positive score; ties
/// break toward the lowest user index; a column with no positive score is
/// left unassigned.
inline Matrix<std::uint8_t> assign_subchannels(const Matrix<double>& scores) {
  Matrix<std::uint8_t> rho(scores.rows(), scores.cols(), 0);
  for (std::size_t n = 0; n < scores.cols(); ++n) {
    std::size_t best = 0;
    double best_score = scores(0, n);
    for (std::size_t k = 1; k < scores.rows(); ++k) {
      if (scores(k, n) > best_score) {
        best = k;
        best_score = scores(k, n);
      }
    }
    if (best_score > 0.0) rho(best, n) = 1;
  }
  return rho;
}

// ---------------------------------------------------------------------------
// Feasibility pre-check

/// Upper bound on user k's achievable rate: every subchannel at the largest
/// per-channel power any feasible allocation could use, plus the CPU at full
/// speed. A requirement above this bound is unreachable by construction.
inline double max_rate_bound(const Scenario& s, std::size_t k, bool include_local = true) {
  const SystemParams& sys = s.system;
  const UserParams& u = s.users[k];
  const double p_full = (u.max_power - sys.circuit_power) / sys.amplifier_coeff;
  double r = 0.0;
  for (std::size_t n = 0; n < s.num_subchannels(); ++n) {
    r += sys.bandwidth_per_subchannel * log2_strict(1.0 + p_full * s.gains(k, n) / sys.noise_power);
  }
  if (include_local) r += u.max_cpu_freq / u.cycles_per_bit;
  return r;
}

inline void check_rate_reachable(const Scenario& s, bool include_local = true) {
  for (std::size_t k = 0; k < s.num_users(); ++k) {
    if (max_rate_bound(s, k, include_local) < s.users[k].min_bits_rate) {
      throw Error(Errc::InfeasibleInstance,
                  "user " + std::to_string(k) + " cannot reach its minimum rate even at full power");
    }
  }
}

// ---------------------------------------------------------------------------
// Per-user primitives

namespace detail {

/// Exact solution of one user's convex subproblem on a fixed channel set:
/// multipliers of the active rate/power constraints plus the resulting
/// operating point.
struct UserFit {
  double alpha = 0.0, sigma = 0.0;  // C1 / C2 multipliers on top of the base prices
  double rate = 0.0, power = 0.0, freq = 0.0;
  bool feasible = true;  // the rate requirement is reachable on this channel set
};

/// A user's exact constrained CE optimum on a fixed channel set.
struct SoloCe {
  double eta = 0.0;  // best rate/power ratio
  UserFit fit;       // multipliers at base prices (1, eta)
  bool feasible = true;
};

/// Closed-form primal recovery and per-user fitting at arbitrary prices,
/// with per-user path eligibility (the radio or the CPU may be disabled).
class UserFitter {
 public:
  UserFitter(const Scenario& s, std::vector<std::uint8_t> can_transmit, std::vector<std::uint8_t> can_compute)
      : s_(s), can_tx_(std::move(can_transmit)), can_cp_(std::move(can_compute)) {}

  static constexpr double kDualCap = 1e30;

  const Scenario& scenario() const { return s_; }
  bool can_transmit(std::size_t k) const { return can_tx_[k] != 0; }
  bool can_compute(std::size_t k) const { return can_cp_[k] != 0; }

  double per_channel_cap(std::size_t k) const {
    return (s_.users[k].max_power - s_.system.circuit_power) / s_.system.amplifier_coeff;
  }

  /// Candidate power at unit assignment share; capped at the single-channel
  /// budget so transient degenerate prices cannot produce infinities.
  double candidate_power(std::size_t k, std::size_t n, double cr, double cp) const {
    if (!can_tx_[k] || cr <= 0.0) return 0.0;
    const double cap = per_channel_cap(k);
    if (cp <= 0.0) return cap;
    const SystemParams& sys = s_.system;
    const double level = cr * sys.bandwidth_per_subchannel / (std::numbers::ln2 * sys.amplifier_coeff * cp);
    return std::clamp(level - sys.noise_power / s_.gains(k, n), 0.0, cap);
  }

  /// Frequency recovery: {clamped, unclamped}; the unclamped value drives
  /// the frequency-cap subgradient.
  std::pair<double, double> frequency(std::size_t k, double cr, double cp, double upsilon = 0.0) const {
    const UserParams& u = s_.users[k];
    if (!can_cp_[k] || u.max_cpu_freq <= 0.0) return {0.0, 0.0};
    const double bracket = cr / u.cycles_per_bit - upsilon;
    if (bracket <= 0.0) return {0.0, 0.0};
    if (cp <= 0.0) return {u.max_cpu_freq, 2.0 * u.max_cpu_freq};
    const double f = std::sqrt(bracket / (3.0 * cp * u.chip_coeff));
    return {std::min(f, u.max_cpu_freq), f};
  }

  /// Rate and power of user k on a fixed channel set at the given prices.
  std::pair<double, double> rate_power(std::size_t k, const std::vector<std::size_t>& owned, double cr,
                                       double cp) const {
    const SystemParams& sys = s_.system;
    const UserParams& u = s_.users[k];
    double r = 0.0, ptx = 0.0;
    for (std::size_t n : owned) {
      const double p = candidate_power(k, n, cr, cp);
      r += sys.bandwidth_per_subchannel * log2_strict(1.0 + p * s_.gains(k, n) / sys.noise_power);
      ptx += p;
    }
    const double f = frequency(k, cr, cp).first;
    if (can_cp_[k]) r += f / u.cycles_per_bit;
    return {r, sys.amplifier_coeff * ptx + u.chip_coeff * f * f * f + sys.circuit_power};
  }

  /// Smallest C2 multiplier meeting the power cap on a fixed channel set;
  /// the bisection returns the feasible-side endpoint of its bracket.
  double sigma_for_budget(std::size_t k, const std::vector<std::size_t>& owned, double br, double bp,
                          double alpha) const {
    const double cap = s_.users[k].max_power;
    const double cr = br + alpha;
    if (rate_power(k, owned, cr, bp).second <= cap) return 0.0;
    double lo = 0.0, hi = std::max(1.0, bp);
    while (rate_power(k, owned, cr, bp + hi).second > cap) {
      hi *= 2.0;
      if (hi > kDualCap) return kDualCap;  // cannot happen: power -> p_c < cap as sigma -> inf
    }
    for (int i = 0; i < 70; ++i) {
      const double mid = 0.5 * (lo + hi);
      (rate_power(k, owned, cr, bp + mid).second > cap ? lo : hi) = mid;
    }
    return hi;
  }

  /// Maximizes br*R - bp*P on a fixed channel set subject to the rate
  /// requirement and power cap: the C1 multiplier is bisected with the C2
  /// multiplier re-fit at every probe, so both constraints end on their
  /// feasible side.
  UserFit fit_user(std::size_t k, const std::vector<std::size_t>& owned, double br, double bp) const {
    const UserParams& u = s_.users[k];
    UserFit fit;
    double sg = sigma_for_budget(k, owned, br, bp, 0.0);
    auto [r0, p0] = rate_power(k, owned, br, bp + sg);
    if (r0 >= u.min_bits_rate) {
      fit.sigma = sg;
      fit.rate = r0;
      fit.power = p0;
    } else {
      double lo = 0.0, hi = std::max(1.0, br);
      bool reachable = false;
      while (hi <= kDualCap) {
        const double sgh = sigma_for_budget(k, owned, br, bp, hi);
        if (rate_power(k, owned, br + hi, bp + sgh).first >= u.min_bits_rate) {
          reachable = true;
          break;
        }
        hi *= 2.0;
      }
      if (!reachable) {
        fit.alpha = kDualCap;
        fit.feasible = false;
      } else {
        for (int i = 0; i < 70; ++i) {
          const double mid = 0.5 * (lo + hi);
          const double smid = sigma_for_budget(k, owned, br, bp, mid);
          (rate_power(k, owned, br + mid, bp + smid).first >= u.min_bits_rate ? hi : lo) = mid;
        }
        fit.alpha = hi;
      }
      fit.sigma = sigma_for_budget(k, owned, br, bp, fit.alpha);
      auto [r, p] = rate_power(k, owned, br + fit.alpha, bp + fit.sigma);
      fit.rate = r;
      fit.power = p;
    }
    fit.freq = frequency(k, br + fit.alpha, bp + fit.sigma).first;
    return fit;
  }

  /// Exact constrained CE optimum of one user on a fixed channel set: the
  /// standard single-ratio parametric iteration, each step a convex
  /// subproblem solved by fit_user. Converges superlinearly; iterates until
  /// the subtractive objective is zero to machine precision.
  SoloCe solo_ce(std::size_t k, const std::vector<std::size_t>& owned) const {
    SoloCe out;
    double beta = 0.0;
    UserFit fit;
    for (int i = 0; i < 100; ++i) {
      fit = fit_user(k, owned, 1.0, beta);
      if (!fit.feasible) {
        out.fit = fit;
        out.feasible = false;
        return out;
      }
      const double next = fit.rate / fit.power;
      const double gap = std::abs(fit.rate - beta * fit.power);
      beta = next;
      if (gap <= 1e-13 * std::max(fit.rate, 1e-300)) break;
    }
    out.eta = beta;
    out.fit = fit_user(k, owned, 1.0, beta);
    out.feasible = out.fit.feasible;
    return out;
  }

 private:
  const Scenario& s_;
  std::vector<std::uint8_t> can_tx_, can_cp_;
};

// ---------------------------------------------------------------------------
// Inner problem engine (linearized objective at fixed lambda, beta)

/// Prices and path eligibility defining one linearized inner problem.
/// base_rate/base_power carry the objective part (lambda*w and lambda*beta
/// for the parametric solver; other schemes plug in their own constants);
/// the C1/C2 multipliers are added on top by the engine.
struct InnerOptions {
  std::vector<double> base_rate;
  std::vector<double> base_power;
  std::vector<std::uint8_t> can_transmit;
  std::vector<std::uint8_t> can_compute;
  // trimmed seed set and search effort for throwaway solves inside the
  // parametric loop; the final refinement always runs thorough
  bool thorough = true;

  static InnerOptions uniform(std::size_t K, const std::vector<double>& br, const std::vector<double>& bp) {
    InnerOptions o;
    o.base_rate = br;
    o.base_power = bp;
    o.can_transmit.assign(K, 1);
    o.can_compute.assign(K, 1);
    return o;
  }
};

struct InnerResult {
  Allocation alloc;
  std::vector<double> rate, power;
  std::vector<double> alpha, varsigma, upsilon, xi;
  int iterations = 0;
  double max_rate_violation = 0.0;   // relative to the requirement
  double max_power_violation = 0.0;  // relative to the cap
  double objective = 0.0;            // sum_k base_rate*R - base_power*P
  bool feasible = false;
  bool converged = false;
};

class InnerSolver {
 public:
  InnerSolver(const Scenario& s, InnerOptions opt, const SolverConfig& cfg)
      : s_(s),
        opt_(std::move(opt)),
        cfg_(cfg),
        K_(s.num_users()),
        N_(s.num_subchannels()),
        fitter_(s, opt_.can_transmit, opt_.can_compute) {}

  InnerResult run() {
    // Phase 1: projected subgradient on the constraint multipliers with
    // diminishing steps; primal recovery by the closed forms each iterate.
    // This settles the multipliers' region and produces a seed assignment.
    std::vector<double> alpha(K_, 0.0), sigma(K_, 0.0), ups(K_, 0.0), xi(N_, 0.0);
    Allocation alloc = Allocation::zero(K_, N_);
    std::vector<double> f_unc(K_, 0.0), rate(K_), power(K_);
    int it = 0;
    for (; it < cfg_.max_inner_iters; ++it) {
      recover(alpha, sigma, ups, alloc, f_unc);
      for (std::size_t k = 0; k < K_; ++k) {
        rate[k] = user_rate_partial(s_, alloc, k);
        power[k] = user_power_partial(s_, alloc, k);
      }
      double res = 0.0;
      for (std::size_t k = 0; k < K_; ++k) {
        const UserParams& u = s_.users[k];
        res = std::max(res, (u.min_bits_rate - rate[k]) / std::max(u.min_bits_rate, 1.0));
        res = std::max(res, (power[k] - u.max_power) / u.max_power);
      }
      if (res < cfg_.inner_tol) break;
      const double step = cfg_.step0 / std::pow(1.0 + it, cfg_.step_decay);
      for (std::size_t k = 0; k < K_; ++k) {
        const UserParams& u = s_.users[k];
        alpha[k] = std::max(0.0, alpha[k] + step * (u.min_bits_rate - rate[k]) / std::max(u.min_bits_rate, 1.0));
        sigma[k] = std::max(0.0, sigma[k] + step * (power[k] - u.max_power) / u.max_power);
        ups[k] = std::max(0.0, ups[k] + step * (f_unc[k] - u.max_cpu_freq) / std::max(u.max_cpu_freq, 1.0));
      }
      for (std::size_t n = 0; n < N_; ++n) {
        int held = 0;
        for (std::size_t k = 0; k < K_; ++k) held += alloc.assignment(k, n);
        xi[n] = std::max(0.0, xi[n] + step * (held - 1.0));
      }
    }

    // Phase 2: exact refits. Candidate assignments are scored by their
    // exact restricted optima (per-user convex subproblems, bisected to the
    // feasible side). Several deterministic seeds guard against the
    // subgradient phase ending on a tie; re-deriving the assignment at the
    // refit prices either reproduces the vertex or proposes a better one.
    std::vector<std::vector<std::size_t>> seeds;
    seeds.push_back(owners_from(alloc.assignment));
    {
      std::vector<double> zeros(K_, 0.0);
      Allocation greedy = Allocation::zero(K_, N_);
      std::vector<double> tmp(K_);
      recover(zeros, zeros, zeros, greedy, tmp);
      seeds.push_back(owners_from(greedy.assignment));
    }
    if (opt_.thorough) {
      seeds.push_back(gain_argmax_owners());
      seeds.emplace_back(N_, K_);  // everything unassigned
    }
    Vertex best = fit_vertex(seeds.front());
    for (std::size_t i = 1; i < seeds.size(); ++i) {
      if (seeds[i] == seeds.front()) continue;
      Vertex v = fit_vertex(seeds[i]);
      if (better(v, best)) best = v;
    }
    for (int round = 0; round < kPolishRounds; ++round) {
      std::vector<std::size_t> next = owners_from(score_assignment(best));
      if (next == best.owner) break;
      Vertex v = fit_vertex(next);
      if (!better(v, best)) break;
      best = v;
    }

    // Phase 3: single-column and column-swap exchanges until no move
    // improves the exact restricted optimum. Deterministic scan order;
    // terminates because each accepted move strictly improves the pair
    // (feasibility count, objective).
    local_search(best);

    return finalize(best, it);
  }

  std::vector<std::size_t> gain_argmax_owners() const {
    std::vector<std::size_t> owner(N_, K_);
    for (std::size_t n = 0; n < N_; ++n) {
      std::size_t argmax = 0;
      for (std::size_t k = 1; k < K_; ++k) {
        if (s_.gains(k, n) > s_.gains(argmax, n)) argmax = k;
      }
      if (opt_.can_transmit[argmax]) owner[n] = argmax;
    }
    return owner;
  }

 private:
  static constexpr int kPolishRounds = 6;
  static constexpr int kLocalSearchPasses = 6;

  struct Vertex {
    std::vector<std::size_t> owner;  // per subchannel, K_ == unassigned
    std::vector<UserFit> fit;
    double objective = 0.0;
    int infeasible_users = 0;
  };

  void recover(const std::vector<double>& alpha, const std::vector<double>& sigma, const std::vector<double>& ups,
               Allocation& alloc, std::vector<double>& f_unc) const {
    Matrix<double> scores(K_, N_, 0.0);
    Matrix<double> cand(K_, N_, 0.0);
    for (std::size_t k = 0; k < K_; ++k) {
      const double cr = opt_.base_rate[k] + alpha[k];
      const double cp = opt_.base_power[k] + sigma[k];
      for (std::size_t n = 0; n < N_; ++n) {
        cand(k, n) = fitter_.candidate_power(k, n, cr, cp);
        scores(k, n) = channel_indicator(cr, s_.system, cand(k, n), s_.gains(k, n));
      }
    }
    alloc.assignment = assign_subchannels(scores);
    for (std::size_t k = 0; k < K_; ++k) {
      for (std::size_t n = 0; n < N_; ++n) {
        alloc.power(k, n) = alloc.assignment(k, n) ? cand(k, n) : 0.0;
      }
      const double cr = opt_.base_rate[k] + alpha[k];
      const double cp = opt_.base_power[k] + sigma[k];
      auto [f, fu] = fitter_.frequency(k, cr, cp, ups[k]);
      alloc.cpu_freq[k] = f;
      f_unc[k] = fu;
    }
  }

  std::vector<std::size_t> owners_from(const Matrix<std::uint8_t>& assignment) const {
    std::vector<std::size_t> owner(N_, K_);
    for (std::size_t n = 0; n < N_; ++n) {
      for (std::size_t k = 0; k < K_; ++k) {
        if (assignment(k, n)) owner[n] = k;
      }
    }
    return owner;
  }

  std::vector<std::size_t> owned_of(const std::vector<std::size_t>& owner, std::size_t k) const {
    std::vector<std::size_t> owned;
    for (std::size_t n = 0; n < N_; ++n) {
      if (owner[n] == k) owned.push_back(n);
    }
    return owned;
  }

  Vertex fit_vertex(std::vector<std::size_t> owner) const {
    Vertex v;
    v.owner = std::move(owner);
    v.fit.resize(K_);
    for (std::size_t k = 0; k < K_; ++k) {
      v.fit[k] = fitter_.fit_user(k, owned_of(v.owner, k), opt_.base_rate[k], opt_.base_power[k]);
      v.objective += opt_.base_rate[k] * v.fit[k].rate - opt_.base_power[k] * v.fit[k].power;
      v.infeasible_users += v.fit[k].feasible ? 0 : 1;
    }
    return v;
  }

  static bool better(const Vertex& a, const Vertex& b) {
    if (a.infeasible_users != b.infeasible_users) return a.infeasible_users < b.infeasible_users;
    return a.objective > b.objective;
  }

  /// Assignment proposed by the subchannel scores at a vertex's multipliers.
  Matrix<std::uint8_t> score_assignment(const Vertex& v) const {
    Matrix<double> scores(K_, N_, 0.0);
    for (std::size_t k = 0; k < K_; ++k) {
      const double cr = opt_.base_rate[k] + v.fit[k].alpha;
      const double cp = opt_.base_power[k] + v.fit[k].sigma;
      for (std::size_t n = 0; n < N_; ++n) {
        scores(k, n) = channel_indicator(cr, s_.system, fitter_.candidate_power(k, n, cr, cp), s_.gains(k, n));
      }
    }
    return assign_subchannels(scores);
  }

  /// Applies owner changes on the affected users and accepts the trial if
  /// it improves (feasibility count, objective) lexicographically.
  bool try_move(Vertex& v, const std::vector<std::size_t>& owner, std::initializer_list<std::size_t> touched) const {
    Vertex trial = v;
    trial.owner = owner;
    for (std::size_t k : touched) {
      if (k >= K_) continue;
      trial.objective -= opt_.base_rate[k] * trial.fit[k].rate - opt_.base_power[k] * trial.fit[k].power;
      trial.infeasible_users -= trial.fit[k].feasible ? 0 : 1;
      trial.fit[k] = fitter_.fit_user(k, owned_of(owner, k), opt_.base_rate[k], opt_.base_power[k]);
      trial.objective += opt_.base_rate[k] * trial.fit[k].rate - opt_.base_power[k] * trial.fit[k].power;
      trial.infeasible_users += trial.fit[k].feasible ? 0 : 1;
    }
    const double tol = 1e-12 * (std::abs(v.objective) + 1e-300);
    if (trial.infeasible_users < v.infeasible_users ||
        (trial.infeasible_users == v.infeasible_users && trial.objective > v.objective + tol)) {
      v = std::move(trial);
      return true;
    }
    return false;
  }

  void local_search(Vertex& v) const {
    const int passes = opt_.thorough ? kLocalSearchPasses : 2;
    for (int pass = 0; pass < passes; ++pass) {
      bool moved = false;
      for (std::size_t n = 0; n < N_; ++n) {
        const std::size_t cur_owner = v.owner[n];
        for (std::size_t cand = 0; cand <= K_; ++cand) {  // K_ means unassigned
          if (cand == cur_owner) continue;
          if (cand < K_ && !opt_.can_transmit[cand]) continue;
          std::vector<std::size_t> owner = v.owner;
          owner[n] = cand;
          moved = try_move(v, owner, {cur_owner, cand}) || moved;
        }
      }
      // swaps catch the exchanges single moves cannot reach without passing
      // through a worse intermediate vertex
      for (std::size_t n = 0; n + 1 < N_; ++n) {
        for (std::size_t m = n + 1; m < N_; ++m) {
          if (v.owner[n] == v.owner[m]) continue;
          std::vector<std::size_t> owner = v.owner;
          std::swap(owner[n], owner[m]);
          moved = try_move(v, owner, {owner[n], owner[m]}) || moved;
        }
      }
      if (!moved) break;
    }
  }

  InnerResult finalize(const Vertex& v, int subgradient_iters) const {
    InnerResult out;
    out.alloc = Allocation::zero(K_, N_);
    out.rate.resize(K_);
    out.power.resize(K_);
    out.alpha.resize(K_);
    out.varsigma.resize(K_);
    out.upsilon.assign(K_, 0.0);
    out.iterations = subgradient_iters;

    for (std::size_t n = 0; n < N_; ++n) {
      if (v.owner[n] < K_) out.alloc.assignment(v.owner[n], n) = 1;
    }
    for (std::size_t k = 0; k < K_; ++k) {
      const UserFit& fit = v.fit[k];
      const double cr = opt_.base_rate[k] + fit.alpha;
      const double cp = opt_.base_power[k] + fit.sigma;
      for (std::size_t n = 0; n < N_; ++n) {
        if (v.owner[n] == k) out.alloc.power(k, n) = fitter_.candidate_power(k, n, cr, cp);
      }
      out.alloc.cpu_freq[k] = fit.freq;
      out.alpha[k] = fit.alpha;
      out.varsigma[k] = fit.sigma;
    }
    // a zero-power grant carries no value; drop it so allocation invariants hold
    for (std::size_t k = 0; k < K_; ++k) {
      for (std::size_t n = 0; n < N_; ++n) {
        if (out.alloc.assignment(k, n) && out.alloc.power(k, n) == 0.0) out.alloc.assignment(k, n) = 0;
      }
    }

    for (std::size_t k = 0; k < K_; ++k) {
      const UserParams& u = s_.users[k];
      out.rate[k] = user_rate_partial(s_, out.alloc, k);
      out.power[k] = user_power_partial(s_, out.alloc, k);
      // KKT multiplier of the frequency cap, nonzero only at the clamp.
      if (opt_.can_compute[k] && u.max_cpu_freq > 0.0 && out.alloc.cpu_freq[k] >= u.max_cpu_freq * (1.0 - 1e-12)) {
        const double cr = opt_.base_rate[k] + out.alpha[k];
        const double cp = opt_.base_power[k] + out.varsigma[k];
        out.upsilon[k] =
            std::max(0.0, cr / u.cycles_per_bit - 3.0 * cp * u.chip_coeff * u.max_cpu_freq * u.max_cpu_freq);
      }
      out.objective += opt_.base_rate[k] * out.rate[k] - opt_.base_power[k] * out.power[k];
      out.max_rate_violation =
          std::max(out.max_rate_violation, (u.min_bits_rate - out.rate[k]) / std::max(u.min_bits_rate, 1.0));
      out.max_power_violation = std::max(out.max_power_violation, (out.power[k] - u.max_power) / u.max_power);
    }
    out.feasible = out.max_rate_violation <= kFeasTol && out.max_power_violation <= kFeasTol;
    out.max_rate_violation = std::max(0.0, out.max_rate_violation);
    out.max_power_violation = std::max(0.0, out.max_power_violation);
    out.converged = out.feasible;

    // Diagnostic exclusivity prices: the runner-up score on each assigned
    // subchannel (any value between runner-up and winner supports the
    // assignment; the runner-up is the tightest).
    out.xi.assign(N_, 0.0);
    for (std::size_t n = 0; n < N_; ++n) {
      if (v.owner[n] >= K_) continue;
      double best = 0.0, second = 0.0;
      for (std::size_t k = 0; k < K_; ++k) {
        const double cr = opt_.base_rate[k] + v.fit[k].alpha;
        const double cp = opt_.base_power[k] + v.fit[k].sigma;
        const double h = channel_indicator(cr, s_.system, fitter_.candidate_power(k, n, cr, cp), s_.gains(k, n));
        if (h > best) {
          second = best;
          best = h;
        } else {
          second = std::max(second, h);
        }
      }
      out.xi[n] = std::max(0.0, second);
    }
    return out;
  }

  const Scenario& s_;
  InnerOptions opt_;
  const SolverConfig& cfg_;
  std::size_t K_, N_;
  UserFitter fitter_;
};

// ---------------------------------------------------------------------------
// Exact CE vertex search: once an assignment is fixed the weighted-sum CE
// separates per user, so assignments can be compared by the sum of exact
// per-user constrained CE optima.

struct CeVertex {
  std::vector<std::size_t> owner;  // per subchannel, K == unassigned
  std::vector<SoloCe> solo;
  double score = 0.0;  // sum of w_k * eta_k over users
  int infeasible_users = 0;
};

/// score_user(k, owned) must return the exact constrained CE optimum of
/// user k on the given channel set.
class CeVertexSearch {
 public:
  using ScoreFn = std::function<SoloCe(std::size_t, const std::vector<std::size_t>&)>;

  CeVertexSearch(const Scenario& s, ScoreFn score, std::vector<std::uint8_t> can_transmit)
      : s_(s), score_(std::move(score)), can_tx_(std::move(can_transmit)), K_(s.num_users()), N_(s.num_subchannels()) {}

  CeVertex run(const std::vector<std::vector<std::size_t>>& seeds) const {
    CeVertex best = fit(seeds.front());
    for (std::size_t i = 1; i < seeds.size(); ++i) {
      if (seeds[i] == seeds.front()) continue;
      CeVertex v = fit(seeds[i]);
      if (better(v, best)) best = v;
    }
    local_search(best);
    return best;
  }

 private:
  static constexpr int kPasses = 8;

  CeVertex fit(std::vector<std::size_t> owner) const {
    CeVertex v;
    v.owner = std::move(owner);
    v.solo.resize(K_);
    for (std::size_t k = 0; k < K_; ++k) {
      v.solo[k] = score_(k, owned_of(v.owner, k));
      v.score += s_.users[k].weight * v.solo[k].eta;
      v.infeasible_users += v.solo[k].feasible ? 0 : 1;
    }
    return v;
  }

  static bool better(const CeVertex& a, const CeVertex& b) {
    if (a.infeasible_users != b.infeasible_users) return a.infeasible_users < b.infeasible_users;
    return a.score > b.score;
  }

  std::vector<std::size_t> owned_of(const std::vector<std::size_t>& owner, std::size_t k) const {
    std::vector<std::size_t> owned;
    for (std::size_t n = 0; n < N_; ++n) {
      if (owner[n] == k) owned.push_back(n);
    }
    return owned;
  }

  bool try_move(CeVertex& v, const std::vector<std::size_t>& owner, std::initializer_list<std::size_t> touched) const {
    CeVertex trial = v;
    trial.owner = owner;
    for (std::size_t k : touched) {
      if (k >= K_) continue;
      trial.score -= s_.users[k].weight * trial.solo[k].eta;
      trial.infeasible_users -= trial.solo[k].feasible ? 0 : 1;
      trial.solo[k] = score_(k, owned_of(owner, k));
      trial.score += s_.users[k].weight * trial.solo[k].eta;
      trial.infeasible_users += trial.solo[k].feasible ? 0 : 1;
    }
    const double tol = 1e-12 * (std::abs(v.score) + 1e-300);
    if (trial.infeasible_users < v.infeasible_users ||
        (trial.infeasible_users == v.infeasible_users && trial.score > v.score + tol)) {
      v = std::move(trial);
      return true;
    }
    return false;
  }

  void local_search(CeVertex& v) const {
    for (int pass = 0; pass < kPasses; ++pass) {
      bool moved = false;
      for (std::size_t n = 0; n < N_; ++n) {
        const std::size_t cur_owner = v.owner[n];
        for (std::size_t cand = 0; cand <= K_; ++cand) {
          if (cand == cur_owner) continue;
          if (cand < K_ && !can_tx_[cand]) continue;
          std::vector<std::size_t> owner = v.owner;
          owner[n] = cand;
          moved = try_move(v, owner, {cur_owner, cand}) || moved;
        }
      }
      for (std::size_t n = 0; n + 1 < N_; ++n) {
        for (std::size_t m = n + 1; m < N_; ++m) {
          if (v.owner[n] == v.owner[m]) continue;
          std::vector<std::size_t> owner = v.owner;
          std::swap(owner[n], owner[m]);
          moved = try_move(v, owner, {owner[n], owner[m]}) || moved;
        }
      }
      // compound moves: strip a user's whole set, or hand a user every
      // unassigned subchannel; single moves may be blocked by a valley
      for (std::size_t k = 0; k < K_; ++k) {
        {
          std::vector<std::size_t> owner = v.owner;
          bool any = false;
          for (std::size_t n = 0; n < N_; ++n) {
            if (owner[n] == k) {
              owner[n] = K_;
              any = true;
            }
          }
          if (any) moved = try_move(v, owner, {k}) || moved;
        }
        if (can_tx_[k]) {
          std::vector<std::size_t> owner = v.owner;
          bool any = false;
          for (std::size_t n = 0; n < N_; ++n) {
            if (owner[n] == K_) {
              owner[n] = k;
              any = true;
            }
          }
          if (any) moved = try_move(v, owner, {k}) || moved;
        }
      }
      if (!moved) break;
    }
  }

  const Scenario& s_;
  ScoreFn score_;
  std::vector<std::uint8_t> can_tx_;
  std::size_t K_, N_;
};

// ---------------------------------------------------------------------------
// Parametric outer loop, shared by the partial solver, the offloading-only
// baseline and the binary solver (which plugs in a composite inner solve).

struct ParametricState {
  InnerResult inner;
  std::vector<double> rate, power;  // as scored by the scheme's own mode
  double weighted_sum_ce = 0.0;
};

struct ParametricOutcome {
  ParametricState state;
  std::vector<double> lambda, beta;
  SolveTrace trace;
  bool converged = false;
  int outer_iterations = 0;
};

/// Runs the damped fixed-point on (lambda, beta) with residual backtracking:
/// a proposed step is halved until the fixed-point residual decreases, so
/// the iteration cannot settle into the limit cycles a constant step admits.
inline ParametricOutcome parametric_fixed_point(
    const Scenario& s, const SolverConfig& cfg,
    const std::function<ParametricState(const std::vector<double>&, const std::vector<double>&)>& solve_at) {
  const std::size_t K = s.num_users();
  ParametricOutcome out;

  auto residual = [&](const std::vector<double>& lambda, const std::vector<double>& beta,
                      const ParametricState& st) {
    double r = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double wr = s.users[k].weight * st.rate[k];
      r = std::max(r, std::abs(wr - beta[k] * st.power[k]) / std::max(wr, 1e-300));
      r = std::max(r, std::abs(lambda[k] * st.power[k] - 1.0));
    }
    return r;
  };

  std::vector<double> lambda(K, 1.0 / s.system.circuit_power), beta(K, 0.0);
  ParametricState cur = solve_at(lambda, beta);
  double res = residual(lambda, beta, cur);

  ParametricState best = cur;
  std::vector<double> best_lambda = lambda, best_beta = beta;
  bool have_best = cur.inner.feasible;

  double prev_ce = cur.weighted_sum_ce;
  int stalled = 0;
  int since_progress = 0;
  double best_res_seen = res;
  int outer = 0;
  for (; outer < cfg.max_outer_iters; ++outer) {
    IterationRecord rec;
    rec.outer = outer;
    rec.inner = cur.inner.iterations;
    rec.weighted_sum_ce = cur.weighted_sum_ce;
    rec.fixed_point_residual = res;
    rec.max_rate_violation = cur.inner.max_rate_violation;
    rec.max_power_violation = cur.inner.max_power_violation;
    rec.lambda = lambda;
    rec.beta = beta;
    out.trace.records.push_back(std::move(rec));

    const double rel_change =
        outer == 0 ? 1.0 : std::abs(cur.weighted_sum_ce - prev_ce) / std::max(std::abs(prev_ce), 1e-300);
    if (outer > 0 && res < cfg.outer_tol && rel_change < cfg.outer_tol && cur.inner.converged) {
      out.converged = true;
      ++outer;
      break;
    }
    prev_ce = cur.weighted_sum_ce;

    double theta = cfg.damping;
    std::vector<double> trial_lambda(K), trial_beta(K);
    bool accepted = false;
    std::vector<double> fallback_lambda, fallback_beta;
    ParametricState fallback_state;
    double fallback_res = std::numeric_limits<double>::infinity();
    for (int bt = 0; bt < 4; ++bt) {
      for (std::size_t k = 0; k < K; ++k) {
        trial_lambda[k] = (1.0 - theta) * lambda[k] + theta / cur.power[k];
        trial_beta[k] = (1.0 - theta) * beta[k] + theta * s.users[k].weight * cur.rate[k] / cur.power[k];
      }
      ParametricState trial_state = solve_at(trial_lambda, trial_beta);
      const double trial_res = residual(trial_lambda, trial_beta, trial_state);
      if (trial_res <= res * (1.0 - 0.05 * theta) || trial_res < cfg.outer_tol) {
        lambda = trial_lambda;
        beta = trial_beta;
        cur = std::move(trial_state);
        res = trial_res;
        accepted = true;
        break;
      }
      if (trial_res < fallback_res) {
        fallback_res = trial_res;
        fallback_lambda = trial_lambda;
        fallback_beta = trial_beta;
        fallback_state = std::move(trial_state);
      }
      theta *= 0.5;
    }
    if (!accepted) {
      // no trial reduced the residual: move to the least-bad one; the
      // best-iterate bookkeeping below protects the returned solution
      lambda = std::move(fallback_lambda);
      beta = std::move(fallback_beta);
      cur = std::move(fallback_state);
      res = fallback_res;
      ++stalled;
    } else {
      stalled = 0;
    }

    if (cur.inner.feasible && (!have_best || cur.weighted_sum_ce > best.weighted_sum_ce)) {
      best = cur;
      best_lambda = lambda;
      best_beta = beta;
      have_best = true;
    }
    if (res < best_res_seen * 0.9) {
      best_res_seen = res;
      since_progress = 0;
    } else {
      ++since_progress;
    }
    if (stalled >= 3 || since_progress >= 6) {
      // the residual map is discontinuous here (assignment ties); further
      // damping cannot help, the exact refinement takes over
      ++outer;
      break;
    }
  }

  if (out.converged || !have_best) {
    out.state = std::move(cur);
    out.lambda = lambda;
    out.beta = beta;
  } else {
    out.state = std::move(best);
    out.lambda = best_lambda;
    out.beta = best_beta;
  }
  out.outer_iterations = outer;
  return out;
}

/// Builds the returned multipliers and allocation from a CE vertex: lambda
/// and beta are the fixed-point values at the per-user optima, the
/// constraint multipliers are the per-user fits rescaled into the global
/// price convention, and the primal is re-materialized from those
/// multipliers so the closed forms reproduce it exactly.
inline PartialSolution assemble_from_vertex(const Scenario& s, const CeVertex& v, const UserFitter& fitter,
                                            OffloadMode mode, const std::string& scheme) {
  const std::size_t K = s.num_users(), N = s.num_subchannels();
  PartialSolution sol;
  sol.scheme = scheme;
  sol.mode = mode;
  sol.allocation = Allocation::zero(K, N);
  sol.duals = DualState::zero(K, N);

  for (std::size_t n = 0; n < N; ++n) {
    if (v.owner[n] < K) sol.allocation.assignment(v.owner[n], n) = 1;
  }
  std::vector<double> cr(K), cp(K);
  for (std::size_t k = 0; k < K; ++k) {
    const UserParams& u = s.users[k];
    const SoloCe& solo = v.solo[k];
    const double lambda = 1.0 / std::max(solo.fit.power, 1e-300);
    const double beta = u.weight * solo.eta;
    const double alpha = lambda * u.weight * solo.fit.alpha;
    const double sigma = lambda * u.weight * solo.fit.sigma;
    sol.duals.lambda[k] = lambda;
    sol.duals.beta[k] = beta;
    sol.duals.alpha[k] = alpha;
    sol.duals.varsigma[k] = sigma;
    cr[k] = lambda * u.weight + alpha;
    cp[k] = lambda * beta + sigma;

    // materialize at the fit's own prices (the same ratio as the scaled
    // duals) so the feasible-side bisection values are reproduced exactly
    const double cr0 = 1.0 + solo.fit.alpha;
    const double cp0 = solo.eta + solo.fit.sigma;
    for (std::size_t n = 0; n < N; ++n) {
      if (sol.allocation.assignment(k, n)) {
        sol.allocation.power(k, n) = fitter.candidate_power(k, n, cr0, cp0);
        if (sol.allocation.power(k, n) == 0.0) sol.allocation.assignment(k, n) = 0;
      }
    }
    sol.allocation.cpu_freq[k] = fitter.frequency(k, cr0, cp0).first;
    sol.allocation.mode[k] = 0;
    for (std::size_t n = 0; n < N; ++n) {
      if (sol.allocation.assignment(k, n)) sol.allocation.mode[k] = 1;
    }
    if (fitter.can_compute(k) && u.max_cpu_freq > 0.0 &&
        sol.allocation.cpu_freq[k] >= u.max_cpu_freq * (1.0 - 1e-12)) {
      sol.duals.upsilon[k] =
          std::max(0.0, cr[k] / u.cycles_per_bit - 3.0 * cp[k] * u.chip_coeff * u.max_cpu_freq * u.max_cpu_freq);
    }
  }
  // runner-up exclusivity prices at the final multipliers
  for (std::size_t n = 0; n < N; ++n) {
    if (v.owner[n] >= K) continue;
    double best = 0.0, second = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double h = channel_indicator(cr[k], s.system, fitter.candidate_power(k, n, cr[k], cp[k]), s.gains(k, n));
      if (h > best) {
        second = best;
        best = h;
      } else {
        second = std::max(second, h);
      }
    }
    sol.duals.xi[n] = std::max(0.0, second);
  }

  sol.report = ce_report(s, sol.allocation, mode);
  // exact fixed-point pair at the materialized operating point
  for (std::size_t k = 0; k < K; ++k) {
    sol.duals.lambda[k] = 1.0 / sol.report.per_user_power[k];
    sol.duals.beta[k] = s.users[k].weight * sol.report.per_user_ce[k];
  }
  return sol;
}

/// Shared assembly for the proposed partial solver and the offloading-only
/// baseline (same machinery with the CPU path disabled).
inline PartialSolution solve_parametric(const Scenario& s, const SolverConfig& cfg, bool allow_local,
                                        const std::string& scheme) {
  ensure_valid(s);
  cfg.validate();
  check_rate_reachable(s, allow_local);
  const std::size_t K = s.num_users(), N = s.num_subchannels();

  std::vector<std::uint8_t> all_tx(K, 1), compute(K, allow_local ? 1 : 0);

  auto solve_at = [&](const std::vector<double>& lambda, const std::vector<double>& beta) {
    std::vector<double> br(K), bp(K);
    for (std::size_t k = 0; k < K; ++k) {
      br[k] = lambda[k] * s.users[k].weight;
      bp[k] = lambda[k] * beta[k];
    }
    InnerOptions opt = InnerOptions::uniform(K, br, bp);
    opt.can_compute = compute;
    opt.thorough = false;
    ParametricState st;
    st.inner = InnerSolver(s, opt, cfg).run();
    st.rate = st.inner.rate;
    st.power = st.inner.power;
    for (std::size_t k = 0; k < K; ++k) {
      st.weighted_sum_ce += s.users[k].weight * st.rate[k] / st.power[k];
    }
    return st;
  };

  ParametricOutcome o = parametric_fixed_point(s, cfg, solve_at);

  // Exact refinement from the loop's vertex: per-user CE optima are
  // separable at a fixed assignment, so the final assignment search
  // compares true objective values rather than linearized ones.
  UserFitter fitter(s, all_tx, compute);
  auto score = [&fitter](std::size_t k, const std::vector<std::size_t>& owned) { return fitter.solo_ce(k, owned); };

  std::vector<std::vector<std::size_t>> seeds;
  {
    std::vector<std::size_t> loop_owner(N, K);
    for (std::size_t n = 0; n < N; ++n) {
      for (std::size_t k = 0; k < K; ++k) {
        if (o.state.inner.alloc.assignment(k, n)) loop_owner[n] = k;
      }
    }
    seeds.push_back(std::move(loop_owner));
    InnerOptions opt = InnerOptions::uniform(K, std::vector<double>(K, 1.0), std::vector<double>(K, 0.0));
    opt.can_compute = compute;
    seeds.push_back(InnerSolver(s, opt, cfg).gain_argmax_owners());
    seeds.emplace_back(N, K);
  }
  CeVertex vertex = CeVertexSearch(s, score, all_tx).run(seeds);

  PartialSolution sol = assemble_from_vertex(s, vertex, fitter, OffloadMode::partial, scheme);
  sol.trace = std::move(o.trace);
  sol.outer_iterations = o.outer_iterations;

  // final residuals at the returned solution decide convergence
  double res = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double wr = s.users[k].weight * sol.report.per_user_rate[k];
    res = std::max(res, std::abs(wr - sol.duals.beta[k] * sol.report.per_user_power[k]) / std::max(wr, 1e-300));
    res = std::max(res, std::abs(sol.duals.lambda[k] * sol.report.per_user_power[k] - 1.0));
  }
  sol.converged = vertex.infeasible_users == 0 && res < cfg.outer_tol && sol.report.feasible.all();
  sol.status = sol.converged ? SolveStatus::ok : SolveStatus::max_iters_exceeded;

  IterationRecord final_rec;
  final_rec.outer = o.outer_iterations;
  final_rec.inner = 0;
  final_rec.weighted_sum_ce = sol.report.weighted_sum_ce;
  final_rec.fixed_point_residual = res;
  final_rec.lambda = sol.duals.lambda;
  final_rec.beta = sol.duals.beta;
  sol.trace.records.push_back(std::move(final_rec));
  return sol;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public operations

struct InnerLoopResult {
  Allocation allocation;
  DualState duals;
  double max_rate_violation = 0.0;
  double max_power_violation = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Solves the linearized problem at a fixed (lambda, beta) pair. Throws
/// InfeasibleInstance when the pre-check shows the requirement unreachable.
inline InnerLoopResult inner_dual_loop(const Scenario& s, const std::vector<double>& lambda,
                                       const std::vector<double>& beta, const SolverConfig& cfg) {
  const std::size_t K = s.num_users(), N = s.num_subchannels();
  if (lambda.size() != K || beta.size() != K) {
    throw Error(Errc::IndexOutOfRange, "lambda/beta size mismatch");
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (!(lambda[k] > 0.0) || beta[k] < 0.0) {
      throw Error(Errc::DegenerateDual, "inner loop requires lambda > 0 and beta >= 0");
    }
  }
  check_rate_reachable(s);

  std::vector<double> br(K), bp(K);
  for (std::size_t k = 0; k < K; ++k) {
    br[k] = lambda[k] * s.users[k].weight;
    bp[k] = lambda[k] * beta[k];
  }
  auto res = detail::InnerSolver(s, detail::InnerOptions::uniform(K, br, bp), cfg).run();

  InnerLoopResult out;
  out.allocation = std::move(res.alloc);
  out.duals = DualState::zero(K, N);
  out.duals.lambda = lambda;
  out.duals.beta = beta;
  out.duals.alpha = res.alpha;
  out.duals.varsigma = res.varsigma;
  out.duals.upsilon = res.upsilon;
  out.duals.xi = res.xi;
  out.max_rate_violation = res.max_rate_violation;
  out.max_power_violation = res.max_power_violation;
  out.iterations = res.iterations;
  out.converged = res.converged;
  return out;
}

/// One damped parametric update toward lambda = 1/P, beta = w*R/P.
inline std::pair<std::vector<double>, std::vector<double>> update_lambda_beta(
    const Scenario& s, const Allocation& a, const std::vector<double>& lambda, const std::vector<double>& beta,
    double damping, OffloadMode mode = OffloadMode::partial) {
  const std::size_t K = s.num_users();
  std::vector<double> nl(K), nb(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double P = user_power(s, a, k, mode);
    const double R = user_rate(s, a, k, mode);
    if (!(P > 0.0)) {
      throw Error(Errc::ZeroPower, "user power must be positive (circuit power is strictly positive)");
    }
    nl[k] = (1.0 - damping) * lambda[k] + damping / P;
    nb[k] = (1.0 - damping) * beta[k] + damping * s.users[k].weight * R / P;
  }
  return {nl, nb};
}

/// Weighted-sum CE maximization under partial offloading.
inline PartialSolution solve_partial(const Scenario& s, const SolverConfig& cfg = {}) {
  return detail::solve_parametric(s, cfg, /*allow_local=*/true, "proposed-partial");
}

}  // namespace cemax
