#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cemax/channel.hpp"
#include "cemax/scenario_io.hpp"
#include "cemax/solver_partial.hpp"
#include "cemax/sweep.hpp"

using namespace cemax;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("cemax_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args, const fs::path& out_file = {}) {
  std::string cmd = std::string(CEMAX_CLI_PATH) + " " + args;
  if (!out_file.empty()) {
    cmd += " > " + out_file.string() + " 2>&1";
  } else {
    cmd += " > /dev/null 2>&1";
  }
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("scenario json round trip with SI quantity strings") {
  const std::string text = R"({
    "system": {"bandwidth_per_subchannel": "2MHz", "block_duration": "1s",
               "num_subchannels": 4, "noise_power": "1nW",
               "amplifier_coeff": 3, "circuit_power": "50mW"},
    "users": [
      {"weight": 1, "cycles_per_bit": 1000, "chip_coeff": 1e-24,
       "max_cpu_freq": "100MHz", "min_bits_rate": "20kbps", "max_power": "3W"},
      {"weight": 1, "cycles_per_bit": 1000, "chip_coeff": 1e-24,
       "max_cpu_freq": "100MHz", "min_bits_rate": "20kbps", "max_power": "3W"}
    ],
    "rng_seed": 1,
    "channel": {"mean_gain": 1e-4, "rng_seed": 1}
  })";
  auto loaded = scenario_from_json_text(text);
  const Scenario& s = loaded.scenario;
  CHECK(s.system.bandwidth_per_subchannel == 2e6);
  CHECK(s.system.noise_power == Catch::Approx(1e-9));
  CHECK(s.system.circuit_power == Catch::Approx(0.05));
  CHECK(s.users[0].max_cpu_freq == 1e8);
  CHECK(s.users[0].min_bits_rate == 2e4);
  CHECK(s.users[0].max_power == 3.0);
  CHECK(s.gains == make_default_scenario(2, 4, 1).gains);

  // a written scenario read back produces identical solver output
  auto round = scenario_from_json_text(scenario_to_json(s).dump());
  auto a = solve_partial(s);
  auto b = solve_partial(round.scenario);
  CHECK(a.report.weighted_sum_ce == b.report.weighted_sum_ce);
  CHECK(a.allocation.power == b.allocation.power);
}

TEST_CASE("scenario parse failures carry diagnostics") {
  CHECK_THROWS_AS(scenario_from_json_text("{not json"), Error);
  CHECK_THROWS_AS(scenario_from_json_text(R"({"users": []})"), Error);
  CHECK_THROWS_AS(scenario_from_json_text(R"({"users": [{}]})"), Error);  // no gains or channel
  const std::string bad_unit = R"({
    "users": [{"max_power": "3 parsec"}], "channel": {"mean_gain": 1e-4}})";
  try {
    scenario_from_json_text(bad_unit);
    FAIL("expected ConfigParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ConfigParseError);
    CHECK(std::string(e.what()).find("max_power") != std::string::npos);
  }
}

TEST_CASE("solver config overrides are honored") {
  auto loaded = scenario_from_json_text(R"({
    "users": [{}, {}],
    "channel": {"mean_gain": 1e-4, "rng_seed": 3},
    "solver": {"outer_tol": 1e-5, "max_outer_iters": 30, "damping": 0.5}
  })");
  CHECK(loaded.solver.outer_tol == 1e-5);
  CHECK(loaded.solver.max_outer_iters == 30);
  CHECK(loaded.solver.damping == 0.5);
  CHECK(loaded.solver.max_inner_iters == SolverConfig{}.max_inner_iters);
}

TEST_CASE("sweep CSV has the mandatory header and stable shape") {
  auto s = make_default_scenario(2, 4, 1);
  auto rows = run_sweep(s, {}, SweepParam::pth, 0.1, 1.0, 3, {Scheme::proposed_partial, Scheme::local_only});
  REQUIRE(rows.size() == 6);
  auto csv = sweep_to_csv(rows, "pth");
  CHECK(csv.rfind("sweep_param,sweep_value,scheme,weighted_sum_ce,sum_rate,sum_power,converged,iters\n", 0) == 0);
  // one line per row plus the header
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

TEST_CASE("cli gen-scenario, solve, sweep and verify work end to end") {
  TempDir tmp;
  const auto scen = tmp.path / "s.json";
  const auto out1 = tmp.path / "r1.json";
  const auto out2 = tmp.path / "r2.json";
  const auto csv1 = tmp.path / "w1.csv";
  const auto csv2 = tmp.path / "w2.csv";

  REQUIRE(run_cli("gen-scenario --out " + scen.string() + " --k 2 --n 2 --seed 5") == 0);

  CHECK(run_cli("solve --scenario " + scen.string() + " --out " + out1.string()) == 0);
  CHECK(run_cli("solve --scenario " + scen.string() + " --out " + out2.string()) == 0);
  CHECK(slurp(out1) == slurp(out2));  // byte-identical reruns

  CHECK(run_cli("sweep --scenario " + scen.string() + " --param pth --from 0.1 --to 2 --steps 4 --out " +
                csv1.string() + " --scheme proposed") == 0);
  CHECK(run_cli("sweep --scenario " + scen.string() + " --param pth --from 0.1 --to 2 --steps 4 --out " +
                csv2.string() + " --scheme proposed") == 0);
  CHECK(slurp(csv1) == slurp(csv2));
  CHECK(slurp(csv1).rfind("sweep_param,", 0) == 0);

  CHECK(run_cli("verify --scenario " + scen.string() + " --grid 120") == 0);
  CHECK(run_cli("verify --scenario " + scen.string() + " --mode binary --grid 120") == 0);
}

TEST_CASE("cli exit codes") {
  TempDir tmp;
  const auto scen = tmp.path / "s.json";
  REQUIRE(run_cli("gen-scenario --out " + scen.string() + " --k 2 --n 2 --seed 5") == 0);

  // config error: missing file
  CHECK(run_cli("solve --scenario " + (tmp.path / "absent.json").string()) == 1);

  // infeasible: unreachable rate requirement
  auto j = json::parse(slurp(scen));
  for (auto& u : j["users"]) u["min_bits_rate"] = 1e12;
  const auto infeasible = tmp.path / "inf.json";
  spit(infeasible, j.dump(2));
  CHECK(run_cli("solve --scenario " + infeasible.string()) == 2);

  // malformed json
  const auto broken = tmp.path / "broken.json";
  spit(broken, "{");
  CHECK(run_cli("solve --scenario " + broken.string()) == 1);
}

TEST_CASE("cli trace output matches the documented table shape") {
  TempDir tmp;
  const auto scen = tmp.path / "s.json";
  const auto trace = tmp.path / "trace.csv";
  REQUIRE(run_cli("gen-scenario --out " + scen.string() + " --k 2 --n 4 --seed 1") == 0);
  REQUIRE(run_cli("solve --scenario " + scen.string() + " --scheme all --trace-csv " + trace.string()) == 0);
  const auto text = slurp(trace);
  CHECK(text.rfind("sweep_param,sweep_value,scheme,weighted_sum_ce,", 0) == 0);
  CHECK(text.find("proposed-partial") != std::string::npos);
  CHECK(text.find("proposed-binary") != std::string::npos);
  CHECK(text.find("cb-max") != std::string::npos);
  CHECK(text.find("ec-min") != std::string::npos);
  CHECK(text.find("local-only") != std::string::npos);
  CHECK(text.find("offload-only") != std::string::npos);
}
