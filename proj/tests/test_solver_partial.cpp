#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "cemax/channel.hpp"
#include "cemax/oracle.hpp"
#include "cemax/solver_partial.hpp"
#include "helpers.hpp"

using namespace cemax;

TEST_CASE("slack constraints keep zero multipliers") {
  auto s = make_default_scenario(2, 2, 3);
  for (auto& u : s.users) {
    u.min_bits_rate = 0.0;
    u.max_power = 1e6;
  }
  std::vector<double> lambda(2, 1.0 / s.system.circuit_power), beta(2, 1e6);
  auto r = inner_dual_loop(s, lambda, beta, {});
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(r.duals.alpha[k] == 0.0);
    CHECK(r.duals.varsigma[k] == 0.0);
  }
  CHECK(r.converged);
}

TEST_CASE("unreachable rate requirement fails fast") {
  auto s = make_default_scenario(2, 2, 3);
  for (auto& u : s.users) u.min_bits_rate = 1e12;
  std::vector<double> lambda(2, 1.0), beta(2, 0.0);
  CHECK_THROWS_AS(inner_dual_loop(s, lambda, beta, {}), Error);
  try {
    solve_partial(s);
    FAIL("expected InfeasibleInstance");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InfeasibleInstance);
  }
}

TEST_CASE("inner objective matches an exhaustive grid maximization") {
  auto s = make_default_scenario(2, 2, 5);
  std::vector<double> lambda(2, 1.0 / s.system.circuit_power), beta(2, 1e8);
  auto r = inner_dual_loop(s, lambda, beta, {});

  double solver_obj = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    const double R = user_rate_partial(s, r.allocation, k);
    const double P = user_power_partial(s, r.allocation, k);
    solver_obj += lambda[k] * (s.users[k].weight * R - beta[k] * P);
  }

  // grid maximization of the linearized objective over integer assignments,
  // per-channel log power grids and the frequency grid, feasibility enforced
  const int pts = 200;
  auto p_grid = cemax::oracle_detail::log_grid_with_zero(s.users[0].max_power, pts);
  auto f_grid = cemax::oracle_detail::log_grid_with_zero(s.users[0].max_cpu_freq, pts);
  double best = -1e300;
  for (int o0 = 0; o0 < 3; ++o0) {
    for (int o1 = 0; o1 < 3; ++o1) {  // owner of each column: 0, 1, or none (2)
      double total = 0.0;
      bool ok = true;
      for (std::size_t k = 0; k < 2 && ok; ++k) {
        std::vector<std::size_t> owned;
        if (o0 == static_cast<int>(k)) owned.push_back(0);
        if (o1 == static_cast<int>(k)) owned.push_back(1);
        double user_best = -1e300;
        const std::size_t m = owned.size();
        const std::size_t p_count = p_grid.size();
        std::vector<std::size_t> idx(m, 0);
        while (true) {
          double rate_tx = 0.0, ptx = 0.0;
          for (std::size_t j = 0; j < m; ++j) {
            const double p = p_grid[idx[j]];
            rate_tx += s.system.bandwidth_per_subchannel *
                       log2_strict(1.0 + p * s.gains(k, owned[j]) / s.system.noise_power);
            ptx += p;
          }
          for (double f : f_grid) {
            const double R = rate_tx + f / s.users[k].cycles_per_bit;
            const double P = s.system.amplifier_coeff * ptx + s.users[k].chip_coeff * f * f * f +
                             s.system.circuit_power;
            if (s.users[k].min_bits_rate - R > kFeasTol) continue;
            if (P - s.users[k].max_power > kFeasTol) continue;
            user_best = std::max(user_best, lambda[k] * (s.users[k].weight * R - beta[k] * P));
          }
          // advance the mixed-radix index
          std::size_t j = 0;
          for (; j < m; ++j) {
            if (++idx[j] < p_count) break;
            idx[j] = 0;
          }
          if (m == 0 || j == m) break;
        }
        if (user_best <= -1e300) ok = false;
        total += user_best;
      }
      if (ok) best = std::max(best, total);
    }
  }
  REQUIRE(best > -1e300);
  CHECK(solver_obj >= best - 0.01 * std::abs(best));
}

TEST_CASE("default setup converges within the iteration budget") {
  auto s = make_default_scenario(2, 4, 1);
  auto sol = solve_partial(s);
  CHECK(sol.converged);
  CHECK(sol.outer_iterations <= 50);
  CHECK(sol.report.feasible.all());
}

TEST_CASE("single-user single-channel solve matches a dense grid search") {
  auto s = make_default_scenario(1, 1, 9);
  auto sol = solve_partial(s);
  auto oracle = brute_force_partial(s, {2000});
  REQUIRE(oracle.feasible);
  CHECK(sol.report.weighted_sum_ce >= oracle.weighted_sum_ce * 0.99);
  CHECK(sol.report.weighted_sum_ce <= oracle.weighted_sum_ce * 1.01);
}

TEST_CASE("vanishing channels degrade to local-only computing") {
  auto s = make_default_scenario(2, 4, 2, 1e-30);
  auto sol = solve_partial(s);
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t n = 0; n < 4; ++n) {
      CHECK(sol.allocation.power(k, n) == 0.0);
      CHECK(sol.allocation.assignment(k, n) == 0);
    }
    CHECK(sol.allocation.cpu_freq[k] > 0.0);
  }
  CHECK(sol.converged);
}

TEST_CASE("parametric fixed-point residuals vanish at convergence") {
  for (int seed : {1, 2, 3, 4, 5}) {
    auto s = make_default_scenario(2, 4, seed);
    auto sol = solve_partial(s);
    REQUIRE(sol.converged);
    for (std::size_t k = 0; k < 2; ++k) {
      const double wr = s.users[k].weight * sol.report.per_user_rate[k];
      const double bp = sol.duals.beta[k] * sol.report.per_user_power[k];
      CHECK(std::abs(wr - bp) / wr < 1e-4);
      CHECK(std::abs(sol.duals.lambda[k] * sol.report.per_user_power[k] - 1.0) < 1e-4);
    }
  }
}

TEST_CASE("final powers respect the activation threshold rule") {
  for (int seed : {1, 4, 7}) {
    auto s = make_default_scenario(2, 4, seed);
    auto sol = solve_partial(s);
    for (std::size_t k = 0; k < 2; ++k) {
      const double cr = detail::rate_price(sol.duals, k, s.users[k]);
      const double cp = detail::power_price(sol.duals, k);
      const double thr = activation_threshold(cr, cp, s.system);
      for (std::size_t n = 0; n < 4; ++n) {
        if (sol.allocation.power(k, n) > 0.0) {
          CHECK(s.gains(k, n) > thr);
        }
        if (sol.allocation.assignment(k, n)) {
          CHECK(sol.allocation.power(k, n) > 0.0);
        }
      }
    }
  }
}

TEST_CASE("active power cap is met exactly at the returned solution") {
  auto s = make_default_scenario(2, 2, 5);
  for (auto& u : s.users) u.max_power = 0.06;
  auto sol = solve_partial(s);
  REQUIRE(sol.converged);
  CHECK(sol.report.feasible.max_power);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(sol.report.per_user_power[k] <= 0.06 + kFeasTol);
    // the cap binds at this budget, so the multiplier must be active
    CHECK(sol.report.per_user_power[k] == Catch::Approx(0.06).epsilon(1e-6));
    CHECK(sol.duals.varsigma[k] > 0.0);
  }
}

TEST_CASE("active rate requirement is met exactly at the returned solution") {
  auto s = make_default_scenario(2, 2, 6);
  for (auto& u : s.users) u.min_bits_rate = 2e7;
  auto sol = solve_partial(s);
  REQUIRE(sol.converged);
  CHECK(sol.report.feasible.min_rate);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(sol.report.per_user_rate[k] >= 2e7 - kFeasTol);
    CHECK(sol.report.per_user_rate[k] == Catch::Approx(2e7).epsilon(1e-6));
    CHECK(sol.duals.alpha[k] > 0.0);
  }
}

TEST_CASE("trace records are ordered and end at the returned objective") {
  auto s = make_default_scenario(2, 4, 8);
  auto sol = solve_partial(s);
  REQUIRE_FALSE(sol.trace.records.empty());
  for (std::size_t i = 1; i < sol.trace.records.size(); ++i) {
    CHECK(sol.trace.records[i].outer > sol.trace.records[i - 1].outer);
  }
  CHECK(sol.trace.records.back().weighted_sum_ce == Catch::Approx(sol.report.weighted_sum_ce));
}

TEST_CASE("degenerate lambda is rejected by the inner loop") {
  auto s = make_default_scenario(2, 2, 3);
  std::vector<double> lambda(2, 0.0), beta(2, 0.0);
  CHECK_THROWS_AS(inner_dual_loop(s, lambda, beta, {}), Error);
}
