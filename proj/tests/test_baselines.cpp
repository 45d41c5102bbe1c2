#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cemax/baselines.hpp"
#include "cemax/channel.hpp"
#include "helpers.hpp"

using namespace cemax;

TEST_CASE("local-only interior optimum matches a dense grid search") {
  auto s = make_default_scenario(2, 4, 1);
  auto sol = solve_local_only(s);
  // stationary point of (f/C)/(eps f^3 + p_c): f* = (p_c / (2 eps))^(1/3)
  const double f_star = std::cbrt(s.system.circuit_power / (2.0 * s.users[0].chip_coeff));
  CHECK(f_star == Catch::Approx(2.924017738e7).epsilon(1e-8));
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(sol.allocation.cpu_freq[k] == Catch::Approx(f_star).epsilon(1e-12));
  }

  // dense 1-D scan oracle
  const UserParams& u = s.users[0];
  double best_f = 0.0, best = -1.0;
  for (int i = 0; i <= 2000000; ++i) {
    const double f = u.max_cpu_freq * i / 2000000.0;
    if (f / u.cycles_per_bit < u.min_bits_rate) continue;
    const double ce = (f / u.cycles_per_bit) / (u.chip_coeff * f * f * f + s.system.circuit_power);
    if (ce > best) {
      best = ce;
      best_f = f;
    }
  }
  CHECK(sol.allocation.cpu_freq[0] == Catch::Approx(best_f).epsilon(1e-5));
  CHECK(sol.report.per_user_ce[0] >= best * (1.0 - 1e-6));
}

TEST_CASE("local-only clamps at the frequency cap") {
  auto s = make_default_scenario(1, 4, 1);
  s.users[0].max_cpu_freq = 1e7;  // below the interior optimum 2.92e7
  s.users[0].min_bits_rate = 5e3;  // reachable: needs 5e6 cycles/s
  auto sol = solve_local_only(s);
  CHECK(sol.allocation.cpu_freq[0] == Catch::Approx(1e7));
}

TEST_CASE("local-only infeasible when demand exceeds capacity") {
  auto s = make_default_scenario(1, 4, 1);
  s.users[0].min_bits_rate = 2e5;  // f required 2e8 > f_max 1e8
  CHECK_THROWS_AS(solve_local_only(s), Error);
  try {
    solve_local_only(s);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InfeasibleInstance);
  }
}

TEST_CASE("local-only respects the power-implied frequency bound") {
  auto s = make_default_scenario(1, 4, 1);
  s.users[0].max_power = 0.06;  // budget 0.01 W: f <= cbrt(0.01/eps) = 2.154e7
  auto sol = solve_local_only(s);
  CHECK(sol.allocation.cpu_freq[0] == Catch::Approx(std::cbrt(0.01 / 1e-24)).epsilon(1e-9));
  CHECK(sol.report.per_user_power[0] <= 0.06 + kFeasTol);
}

TEST_CASE("offloading-only equals the partial solver when the CPU is absent") {
  auto s = make_default_scenario(2, 4, 6);
  for (auto& u : s.users) {
    u.max_cpu_freq = 0.0;
    u.min_bits_rate = 0.0;  // no CPU means the rate floor must be reachable by radio alone
  }
  auto off = solve_offloading_only(s);
  auto part = solve_partial(s);
  CHECK(off.report.weighted_sum_ce == Catch::Approx(part.report.weighted_sum_ce).epsilon(1e-9));
  CHECK(off.allocation.assignment == part.allocation.assignment);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(off.allocation.cpu_freq[k] == 0.0);
    for (std::size_t n = 0; n < 4; ++n) {
      CHECK(off.allocation.power(k, n) == Catch::Approx(part.allocation.power(k, n)).epsilon(1e-9));
    }
  }
}

TEST_CASE("offloading-only infeasible when channels cannot carry the requirement") {
  auto s = make_default_scenario(2, 4, 2, 1e-30);
  try {
    solve_offloading_only(s);
    FAIL("expected InfeasibleInstance");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InfeasibleInstance);
  }
}

TEST_CASE("cb-max spends the full power budget") {
  auto s = make_default_scenario(2, 4, 4);
  auto sol = solve_cb_max(s);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(sol.report.per_user_power[k] == Catch::Approx(s.users[k].max_power).epsilon(1e-9));
  }
}

TEST_CASE("cb-max with a weak channel fills the CPU before the leftover radio") {
  // at this gain the radio's marginal bits per watt sit below the CPU's even
  // at zero transmit power, so the CPU saturates first
  auto s = make_default_scenario(1, 1, 4, 1e-12);
  auto sol = solve_cb_max(s);
  CHECK(sol.allocation.cpu_freq[0] == Catch::Approx(s.users[0].max_cpu_freq));
  CHECK(sol.report.per_user_power[0] == Catch::Approx(s.users[0].max_power).epsilon(1e-9));
  CHECK(sol.allocation.power(0, 0) > 0.0);
}

TEST_CASE("ec-min with zero demand spends only circuit power") {
  auto s = make_default_scenario(2, 4, 4);
  for (auto& u : s.users) u.min_bits_rate = 0.0;
  auto sol = solve_ec_min(s);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(sol.report.per_user_power[k] == Catch::Approx(s.system.circuit_power));
    CHECK(sol.allocation.cpu_freq[k] == 0.0);
    for (std::size_t n = 0; n < 4; ++n) CHECK(sol.allocation.power(k, n) == 0.0);
  }
}

TEST_CASE("ec-min meets the requirement tightly") {
  for (int seed : {1, 2, 3, 4, 5}) {
    auto s = make_default_scenario(2, 4, seed);
    auto sol = solve_ec_min(s);
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(sol.report.per_user_rate[k] >= s.users[k].min_bits_rate - kFeasTol);
      CHECK(sol.report.per_user_rate[k] <= s.users[k].min_bits_rate * (1.0 + 1e-3));
    }
  }
}

TEST_CASE("scheme ordering on a seeded batch") {
  int dominated = 0;
  for (int seed = 1; seed <= 25; ++seed) {
    auto s = make_default_scenario(2, 4, seed);
    auto p = solve_partial(s);
    auto off = solve_offloading_only(s);
    auto loc = solve_local_only(s);
    auto cb = solve_cb_max(s);
    auto ec = solve_ec_min(s);

    const double pc = p.report.weighted_sum_ce;
    for (auto* b : {&off, &loc, &cb, &ec}) {
      CHECK(pc >= b->report.weighted_sum_ce * (1.0 - 1e-3));
      if (pc >= b->report.weighted_sum_ce * (1.0 - 1e-3)) ++dominated;
    }

    // cb-max carries the largest total rate, ec-min the smallest total power
    auto total_rate = [&](const PartialSolution& x) {
      double t = 0.0;
      for (double r : x.report.per_user_rate) t += r;
      return t;
    };
    auto total_power = [&](const PartialSolution& x) {
      double t = 0.0;
      for (double q : x.report.per_user_power) t += q;
      return t;
    };
    for (auto* b : {&p, &off, &loc, &ec}) {
      CHECK(total_rate(cb) >= total_rate(*b) * (1.0 - 1e-6));
    }
    for (auto* b : {&p, &off, &loc, &cb}) {
      CHECK(total_power(ec) <= total_power(*b) * (1.0 + 1e-6));
    }
  }
  CHECK(dominated == 100);
}

TEST_CASE("binary-mode baseline variants keep the mode masks") {
  auto s = make_default_scenario(2, 4, 5);
  auto cb = solve_cb_max_binary(s);
  auto ec = solve_ec_min_binary(s);
  for (const auto* sol : {&cb, &ec}) {
    for (std::size_t k = 0; k < 2; ++k) {
      if (sol->allocation.mode[k] == 1) {
        CHECK(sol->allocation.cpu_freq[k] == 0.0);
      } else {
        for (std::size_t n = 0; n < 4; ++n) CHECK(sol->allocation.power(k, n) == 0.0);
      }
    }
  }
}
