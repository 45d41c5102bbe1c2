// Experiment driver: scenario generation, the five solvers, parameter
// sweeps, and solver-vs-oracle verification, with JSON/CSV output.
//
// Exit codes: 0 success, 1 config error, 2 infeasible instance,
// 3 non-convergence, 4 verification gap above threshold.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cemax/baselines.hpp"
#include "cemax/channel.hpp"
#include "cemax/oracle.hpp"
#include "cemax/scenario_io.hpp"
#include "cemax/solver_binary.hpp"
#include "cemax/solver_partial.hpp"
#include "cemax/sweep.hpp"
#include "cemax/units.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitVerifyGap = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cemax::Error(cemax::Errc::ConfigParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cemax::Error(cemax::Errc::ConfigParseError, "cannot write " + path);
  out << text;
}

cemax::LoadedScenario load_scenario(const std::string& path, std::int64_t seed_override = -1) {
  auto loaded = cemax::scenario_from_json_text(read_file(path));
  if (seed_override >= 0) {
    if (!loaded.channel) {
      throw cemax::Error(cemax::Errc::ConfigParseError,
                         "--seed needs a regenerable channel block, not an explicit gain matrix");
    }
    loaded.channel->rng_seed = seed_override;
    loaded.scenario.rng_seed = seed_override;
    loaded.scenario.gains = cemax::sample_gains(*loaded.channel, loaded.scenario.num_users(),
                                                loaded.scenario.num_subchannels());
  }
  return loaded;
}

std::vector<cemax::Scheme> parse_schemes(const std::string& name, cemax::OffloadMode mode) {
  using cemax::Scheme;
  if (name == "all") return cemax::all_schemes();
  if (name == "proposed") {
    return {mode == cemax::OffloadMode::partial ? Scheme::proposed_partial : Scheme::proposed_binary};
  }
  if (name == "offload") return {Scheme::offload_only};
  if (name == "local") return {Scheme::local_only};
  if (name == "cbmax") return {Scheme::cb_max};
  if (name == "ecmin") return {Scheme::ec_min};
  throw cemax::Error(cemax::Errc::ConfigParseError, "unknown scheme '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"computation-efficiency maximization for OFDMA mobile edge computing"};
  app.require_subcommand(1);

  // ---- solve ----
  auto* solve = app.add_subcommand("solve", "solve one scenario and write a JSON report");
  std::string solve_scenario, solve_out, solve_mode = "partial", solve_scheme = "proposed", solve_trace_csv;
  std::string baseline_mode = "partial";
  std::int64_t seed_override = -1;
  solve->add_option("--scenario", solve_scenario, "scenario JSON file")->required();
  solve->add_option("--seed", seed_override, "override the channel seed of the scenario");
  solve->add_option("--out", solve_out, "output JSON file");
  solve->add_option("--mode", solve_mode, "partial|binary")->check(CLI::IsMember({"partial", "binary"}));
  solve->add_option("--scheme", solve_scheme, "proposed|offload|local|cbmax|ecmin|all");
  solve->add_option("--trace-csv", solve_trace_csv, "write per-iteration convergence CSV");
  solve->add_option("--baseline-mode", baseline_mode, "run cb-max/ec-min in partial or binary mode")
      ->check(CLI::IsMember({"partial", "binary"}));

  // ---- sweep ----
  auto* sweep = app.add_subcommand("sweep", "sweep a parameter and write a CSV table");
  std::string sweep_scenario, sweep_out, sweep_param = "pth", sweep_scheme = "all", sweep_mode = "partial";
  double sweep_from = 0.0, sweep_to = 0.0;
  int sweep_steps = 20;
  sweep->add_option("--scenario", sweep_scenario, "scenario JSON file")->required();
  sweep->add_option("--seed", seed_override, "override the channel seed of the scenario");
  sweep->add_option("--param", sweep_param, "pth|rth")->check(CLI::IsMember({"pth", "rth"}));
  sweep->add_option("--from", sweep_from, "sweep start (SI units)")->required();
  sweep->add_option("--to", sweep_to, "sweep end (SI units)")->required();
  sweep->add_option("--steps", sweep_steps, "number of sweep points");
  sweep->add_option("--out", sweep_out, "output CSV file")->required();
  sweep->add_option("--scheme", sweep_scheme, "proposed|offload|local|cbmax|ecmin|all");
  sweep->add_option("--mode", sweep_mode, "partial|binary (for --scheme proposed)")
      ->check(CLI::IsMember({"partial", "binary"}));
  sweep->add_option("--baseline-mode", baseline_mode, "run cb-max/ec-min in partial or binary mode")
      ->check(CLI::IsMember({"partial", "binary"}));

  // ---- verify ----
  auto* verify = app.add_subcommand("verify", "compare the solver against the brute-force oracle");
  std::string verify_scenario, verify_mode = "partial";
  int verify_grid = 200;
  double verify_gap = 0.01;
  verify->add_option("--scenario", verify_scenario, "scenario JSON file (K <= 3, N <= 4)")->required();
  verify->add_option("--seed", seed_override, "override the channel seed of the scenario");
  verify->add_option("--mode", verify_mode, "partial|binary")->check(CLI::IsMember({"partial", "binary"}));
  verify->add_option("--grid", verify_grid, "oracle grid points per dimension");
  verify->add_option("--max-gap", verify_gap, "acceptable |solver - oracle| relative gap");

  // ---- gen-scenario ----
  auto* gen = app.add_subcommand("gen-scenario", "write a scenario JSON file");
  std::string gen_out;
  int gen_k = 2, gen_n = 4;
  std::int64_t gen_seed = 1;
  double gen_mean_gain = 1e-4;
  std::string gen_pth, gen_rth, gen_fmax;
  bool gen_explicit = false;
  gen->add_option("--out", gen_out, "output JSON file")->required();
  gen->add_option("--k", gen_k, "number of users");
  gen->add_option("--n", gen_n, "number of subchannels");
  gen->add_option("--seed", gen_seed, "channel seed");
  gen->add_option("--mean-gain", gen_mean_gain, "average channel power gain");
  gen->add_option("--pth", gen_pth, "per-user power cap, e.g. 3W or 500mW");
  gen->add_option("--rth", gen_rth, "per-user minimum rate, e.g. 20kbps");
  gen->add_option("--fmax", gen_fmax, "per-user CPU frequency cap, e.g. 100MHz");
  gen->add_flag("--explicit-gains", gen_explicit, "store the gain matrix instead of the channel block");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      cemax::Scenario s = cemax::make_default_scenario(static_cast<std::size_t>(gen_k),
                                                       static_cast<std::size_t>(gen_n), gen_seed, gen_mean_gain);
      for (auto& u : s.users) {
        if (!gen_pth.empty()) u.max_power = cemax::parse_si(gen_pth);
        if (!gen_rth.empty()) u.min_bits_rate = cemax::parse_si(gen_rth);
        if (!gen_fmax.empty()) u.max_cpu_freq = cemax::parse_si(gen_fmax);
      }
      cemax::ensure_valid(s);
      std::optional<cemax::ChannelConfig> chan;
      if (!gen_explicit) chan = cemax::ChannelConfig{gen_mean_gain, gen_seed};
      write_file(gen_out, cemax::scenario_to_json(s, chan).dump(2) + "\n");
      std::cout << "wrote " << gen_out << "\n";
      return kExitOk;
    }

    const bool baselines_binary = baseline_mode == "binary";

    if (*solve) {
      auto loaded = load_scenario(solve_scenario, seed_override);
      const auto mode = solve_mode == "binary" ? cemax::OffloadMode::binary : cemax::OffloadMode::partial;
      auto schemes = parse_schemes(solve_scheme, mode);

      cemax::json out = cemax::json::array();
      std::string trace_csv;
      bool all_converged = true;
      for (auto sch : schemes) {
        cemax::PartialSolution sol = cemax::run_scheme(loaded.scenario, loaded.solver, sch, baselines_binary);
        all_converged = all_converged && sol.converged;
        std::cout << sol.scheme << ": weighted_sum_ce=" << cemax::format_sig12(sol.report.weighted_sum_ce)
                  << " converged=" << (sol.converged ? "yes" : "no") << " iters=" << sol.outer_iterations << "\n";
        out.push_back(cemax::solution_to_json(loaded.scenario, sol));
      }
      if (!solve_trace_csv.empty()) {
        auto rows = cemax::convergence_rows(loaded.scenario, loaded.solver, schemes, baselines_binary);
        write_file(solve_trace_csv, cemax::sweep_to_csv(rows, "iter"));
      }
      if (!solve_out.empty()) {
        write_file(solve_out, (out.size() == 1 ? out.front() : out).dump(2) + "\n");
      }
      return all_converged ? kExitOk : kExitNotConverged;
    }

    if (*sweep) {
      auto loaded = load_scenario(sweep_scenario, seed_override);
      const auto mode = sweep_mode == "binary" ? cemax::OffloadMode::binary : cemax::OffloadMode::partial;
      auto schemes = parse_schemes(sweep_scheme, mode);
      const auto param = sweep_param == "pth" ? cemax::SweepParam::pth : cemax::SweepParam::rth;
      auto rows = cemax::run_sweep(loaded.scenario, loaded.solver, param, sweep_from, sweep_to, sweep_steps, schemes,
                                   baselines_binary);
      write_file(sweep_out, cemax::sweep_to_csv(rows, sweep_param));
      std::cout << "wrote " << sweep_out << " (" << rows.size() << " rows)\n";
      return kExitOk;
    }

    if (*verify) {
      auto loaded = load_scenario(verify_scenario, seed_override);
      const auto mode = verify_mode == "binary" ? cemax::OffloadMode::binary : cemax::OffloadMode::partial;
      cemax::GridSpec grid{verify_grid};
      cemax::PartialSolution sol;
      cemax::OracleResult oracle;
      if (mode == cemax::OffloadMode::binary) {
        sol = cemax::solve_binary(loaded.scenario, loaded.solver);
        oracle = cemax::brute_force_binary(loaded.scenario, grid);
      } else {
        sol = cemax::solve_partial(loaded.scenario, loaded.solver);
        oracle = cemax::brute_force_partial(loaded.scenario, grid);
      }
      if (!oracle.feasible) {
        std::cout << "oracle: no feasible point on the grid\n";
        return kExitInfeasible;
      }
      const double gap = sol.report.weighted_sum_ce / oracle.weighted_sum_ce - 1.0;
      auto kkt = cemax::kkt_residuals(loaded.scenario, sol);
      std::cout << "solver  ce=" << cemax::format_sig12(sol.report.weighted_sum_ce) << "\n"
                << "oracle  ce=" << cemax::format_sig12(oracle.weighted_sum_ce) << " (grid " << verify_grid << ")\n"
                << "gap     " << cemax::format_sig12(100.0 * gap) << "%\n"
                << "kkt     stationarity=" << cemax::format_sig12(kkt.max_stationarity)
                << " complementarity=" << cemax::format_sig12(kkt.max_complementarity) << "\n"
                << "fixed-point residuals: rate=" << cemax::format_sig12(kkt.fixed_point_rate_residual)
                << " lambda=" << cemax::format_sig12(kkt.fixed_point_lambda_residual) << "\n";
      return std::abs(gap) <= verify_gap ? kExitOk : kExitVerifyGap;
    }
  } catch (const cemax::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case cemax::Errc::InfeasibleInstance: return kExitInfeasible;
      case cemax::Errc::MaxItersExceeded: return kExitNotConverged;
      default: return kExitConfig;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
