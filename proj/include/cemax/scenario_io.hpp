#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cemax/channel.hpp"
#include "cemax/model.hpp"
#include "cemax/solver_partial.hpp"
#include "cemax/units.hpp"

namespace cemax {

// Scenario files are JSON. Quantity fields accept either plain numbers or
// strings with SI prefixes ("2MHz", "50mW"); everything is converted to
// base units on load. A file carries either an explicit gain matrix or a
// channel block that regenerates one deterministically from its seed.

using json = nlohmann::json;

struct LoadedScenario {
  Scenario scenario;
  SolverConfig solver;  // defaults unless the file overrides them
  std::optional<ChannelConfig> channel;  // present when gains are regenerable
};

namespace io_detail {

inline double quantity(const json& j, const char* field, double fallback) {
  if (!j.contains(field)) return fallback;
  const json& v = j.at(field);
  try {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_si(v.get<std::string>());
  } catch (const Error& e) {
    throw Error(Errc::ConfigParseError, std::string(field) + ": " + e.what());
  }
  throw Error(Errc::ConfigParseError, std::string(field) + ": expected number or quantity string");
}

inline std::int64_t integer(const json& j, const char* field, std::int64_t fallback) {
  if (!j.contains(field)) return fallback;
  if (!j.at(field).is_number_integer()) {
    throw Error(Errc::ConfigParseError, std::string(field) + ": expected integer");
  }
  return j.at(field).get<std::int64_t>();
}

}  // namespace io_detail

inline UserParams user_from_json(const json& j) {
  UserParams u;
  u.weight = io_detail::quantity(j, "weight", u.weight);
  u.cycles_per_bit = io_detail::quantity(j, "cycles_per_bit", u.cycles_per_bit);
  u.chip_coeff = io_detail::quantity(j, "chip_coeff", u.chip_coeff);
  u.max_cpu_freq = io_detail::quantity(j, "max_cpu_freq", u.max_cpu_freq);
  u.min_bits_rate = io_detail::quantity(j, "min_bits_rate", u.min_bits_rate);
  u.max_power = io_detail::quantity(j, "max_power", u.max_power);
  return u;
}

inline SolverConfig solver_from_json(const json& j) {
  SolverConfig c;
  c.outer_tol = io_detail::quantity(j, "outer_tol", c.outer_tol);
  c.inner_tol = io_detail::quantity(j, "inner_tol", c.inner_tol);
  c.max_outer_iters = static_cast<int>(io_detail::integer(j, "max_outer_iters", c.max_outer_iters));
  c.max_inner_iters = static_cast<int>(io_detail::integer(j, "max_inner_iters", c.max_inner_iters));
  c.step0 = io_detail::quantity(j, "step0", c.step0);
  c.step_decay = io_detail::quantity(j, "step_decay", c.step_decay);
  c.damping = io_detail::quantity(j, "damping", c.damping);
  return c;
}

inline LoadedScenario scenario_from_json(const json& j) {
  LoadedScenario out;
  Scenario& s = out.scenario;

  if (j.contains("system")) {
    const json& sys = j.at("system");
    s.system.bandwidth_per_subchannel =
        io_detail::quantity(sys, "bandwidth_per_subchannel", s.system.bandwidth_per_subchannel);
    s.system.block_duration = io_detail::quantity(sys, "block_duration", s.system.block_duration);
    s.system.num_subchannels =
        static_cast<std::size_t>(io_detail::integer(sys, "num_subchannels", static_cast<std::int64_t>(s.system.num_subchannels)));
    s.system.noise_power = io_detail::quantity(sys, "noise_power", s.system.noise_power);
    s.system.amplifier_coeff = io_detail::quantity(sys, "amplifier_coeff", s.system.amplifier_coeff);
    s.system.circuit_power = io_detail::quantity(sys, "circuit_power", s.system.circuit_power);
  }

  if (!j.contains("users") || !j.at("users").is_array() || j.at("users").empty()) {
    throw Error(Errc::ConfigParseError, "scenario requires a non-empty 'users' array");
  }
  for (const json& ju : j.at("users")) s.users.push_back(user_from_json(ju));

  s.rng_seed = io_detail::integer(j, "rng_seed", 1);

  if (j.contains("gains")) {
    const json& g = j.at("gains");
    if (!g.is_array()) throw Error(Errc::ConfigParseError, "gains: expected array of arrays");
    const std::size_t K = g.size();
    const std::size_t N = K > 0 && g.at(0).is_array() ? g.at(0).size() : 0;
    Matrix<double> m(K, N);
    for (std::size_t k = 0; k < K; ++k) {
      if (!g.at(k).is_array() || g.at(k).size() != N) {
        throw Error(Errc::ConfigParseError, "gains: ragged matrix");
      }
      for (std::size_t n = 0; n < N; ++n) m(k, n) = g.at(k).at(n).get<double>();
    }
    s.gains = m;
  } else if (j.contains("channel")) {
    const json& c = j.at("channel");
    ChannelConfig cfg;
    cfg.mean_gain = io_detail::quantity(c, "mean_gain", cfg.mean_gain);
    cfg.rng_seed = io_detail::integer(c, "rng_seed", s.rng_seed);
    s.gains = sample_gains(cfg, s.users.size(), s.system.num_subchannels);
    out.channel = cfg;
  } else {
    throw Error(Errc::ConfigParseError, "scenario requires either 'gains' or 'channel'");
  }

  if (j.contains("solver")) out.solver = solver_from_json(j.at("solver"));

  auto violations = validate_scenario(s);
  if (!violations.empty()) {
    throw Error(violations.front().code, join_violations(violations));
  }
  return out;
}

inline LoadedScenario scenario_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ConfigParseError, e.what());
  }
  return scenario_from_json(j);
}

/// Serializes a scenario. When a channel block is given, gains are written
/// as the compact regenerable form; otherwise the explicit matrix.
inline json scenario_to_json(const Scenario& s, const std::optional<ChannelConfig>& channel = std::nullopt) {
  json j;
  j["system"] = {{"bandwidth_per_subchannel", s.system.bandwidth_per_subchannel},
                 {"block_duration", s.system.block_duration},
                 {"num_subchannels", s.system.num_subchannels},
                 {"noise_power", s.system.noise_power},
                 {"amplifier_coeff", s.system.amplifier_coeff},
                 {"circuit_power", s.system.circuit_power}};
  j["users"] = json::array();
  for (const UserParams& u : s.users) {
    j["users"].push_back({{"weight", u.weight},
                          {"cycles_per_bit", u.cycles_per_bit},
                          {"chip_coeff", u.chip_coeff},
                          {"max_cpu_freq", u.max_cpu_freq},
                          {"min_bits_rate", u.min_bits_rate},
                          {"max_power", u.max_power}});
  }
  j["rng_seed"] = s.rng_seed;
  if (channel) {
    j["channel"] = {{"mean_gain", channel->mean_gain}, {"rng_seed", channel->rng_seed}};
  } else {
    json g = json::array();
    for (std::size_t k = 0; k < s.gains.rows(); ++k) {
      json row = json::array();
      for (std::size_t n = 0; n < s.gains.cols(); ++n) row.push_back(s.gains(k, n));
      g.push_back(row);
    }
    j["gains"] = g;
  }
  return j;
}

inline json allocation_to_json(const Allocation& a) {
  json j;
  json assign = json::array(), power = json::array();
  for (std::size_t k = 0; k < a.assignment.rows(); ++k) {
    json arow = json::array(), prow = json::array();
    for (std::size_t n = 0; n < a.assignment.cols(); ++n) {
      arow.push_back(static_cast<int>(a.assignment(k, n)));
      prow.push_back(a.power(k, n));
    }
    assign.push_back(arow);
    power.push_back(prow);
  }
  j["assignment"] = assign;
  j["power"] = power;
  j["cpu_freq"] = a.cpu_freq;
  json modes = json::array();
  for (auto m : a.mode) modes.push_back(static_cast<int>(m));
  j["mode"] = modes;
  return j;
}

inline json solution_to_json(const Scenario& s, const PartialSolution& sol) {
  json j;
  j["scheme"] = sol.scheme;
  j["mode"] = sol.mode == OffloadMode::partial ? "partial" : "binary";
  j["converged"] = sol.converged;
  j["status"] = sol.status == SolveStatus::ok ? "ok" : "max_iters_exceeded";
  j["outer_iterations"] = sol.outer_iterations;
  j["weighted_sum_ce"] = sol.report.weighted_sum_ce;

  json rep;
  rep["rate"] = sol.report.per_user_rate;
  rep["power"] = sol.report.per_user_power;
  rep["ce"] = sol.report.per_user_ce;
  json bits = json::array();  // computed bits over the block, rate * T
  for (double r : sol.report.per_user_rate) bits.push_back(r * s.system.block_duration);
  rep["computed_bits"] = bits;
  rep["feasible"] = {{"min_rate", sol.report.feasible.min_rate},
                     {"max_power", sol.report.feasible.max_power},
                     {"cpu_freq", sol.report.feasible.cpu_freq},
                     {"exclusivity", sol.report.feasible.exclusivity},
                     {"binary_modes", sol.report.feasible.binary_modes}};
  j["report"] = rep;

  j["allocation"] = allocation_to_json(sol.allocation);
  j["duals"] = {{"lambda", sol.duals.lambda},   {"beta", sol.duals.beta},         {"alpha", sol.duals.alpha},
                {"varsigma", sol.duals.varsigma}, {"upsilon", sol.duals.upsilon},   {"xi", sol.duals.xi},
                {"psi", sol.duals.psi},         {"phi", sol.duals.phi},           {"vartheta", sol.duals.vartheta},
                {"chi", sol.duals.chi}};

  json trace = json::array();
  for (const IterationRecord& r : sol.trace.records) {
    trace.push_back({{"outer", r.outer},
                     {"inner", r.inner},
                     {"weighted_sum_ce", r.weighted_sum_ce},
                     {"fixed_point_residual", r.fixed_point_residual},
                     {"max_rate_violation", r.max_rate_violation},
                     {"max_power_violation", r.max_power_violation},
                     {"lambda", r.lambda},
                     {"beta", r.beta}});
  }
  j["trace"] = trace;
  return j;
}

}  // namespace cemax
