#include <catch2/catch_amalgamated.hpp>

#include "cemax/channel.hpp"
#include "cemax/model.hpp"

using namespace cemax;

TEST_CASE("default experiment scenario is valid") {
  auto s = make_default_scenario(2, 4, 1);
  REQUIRE(validate_scenario(s).empty());
  REQUIRE(s.num_users() == 2);
  REQUIRE(s.num_subchannels() == 4);
}

TEST_CASE("gain matrix shape mismatch is reported") {
  auto s = make_default_scenario(2, 4, 1);
  s.gains = Matrix<double>(2, 3, 1e-4);
  auto vs = validate_scenario(s);
  REQUIRE(vs.size() == 1);
  CHECK(vs.front().code == Errc::GainMatrixShapeMismatch);
}

TEST_CASE("non-positive parameters are reported") {
  auto s = make_default_scenario(2, 4, 1);
  s.system.noise_power = 0.0;
  auto vs = validate_scenario(s);
  REQUIRE(vs.size() == 1);
  CHECK(vs.front().code == Errc::NonPositiveParameter);
  CHECK(vs.front().field == "system.noise_power");
}

TEST_CASE("empty user set is reported") {
  Scenario s;
  s.users.clear();
  s.gains = Matrix<double>(0, 4);
  auto vs = validate_scenario(s);
  bool found = false;
  for (const auto& v : vs) found = found || v.code == Errc::EmptyUserSet;
  CHECK(found);
}

TEST_CASE("every violated invariant is reported independently") {
  auto s = make_default_scenario(2, 4, 1);
  s.system.noise_power = 0.0;       // 1
  s.users[0].weight = 0.0;          // 2
  s.users[1].chip_coeff = -1.0;     // 3
  s.gains(0, 2) = 0.0;              // 4
  auto vs = validate_scenario(s);
  CHECK(vs.size() == 4);
}

TEST_CASE("validation is idempotent") {
  auto good = make_default_scenario(2, 4, 7);
  auto r1 = validate_scenario(good);
  auto r2 = validate_scenario(good);
  CHECK(r1.empty());
  CHECK(r2.empty());

  auto bad = good;
  bad.users[0].max_power = bad.system.circuit_power;  // must strictly exceed
  auto b1 = validate_scenario(bad);
  auto b2 = validate_scenario(bad);
  REQUIRE(b1.size() == b2.size());
  for (std::size_t i = 0; i < b1.size(); ++i) {
    CHECK(b1[i].field == b2[i].field);
    CHECK(b1[i].code == b2[i].code);
  }
}

TEST_CASE("ensure_valid throws with the full violation list") {
  auto s = make_default_scenario(1, 2, 1);
  s.system.amplifier_coeff = -3.0;
  s.users[0].weight = -1.0;
  try {
    ensure_valid(s);
    FAIL("expected an exception");
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(what.find("amplifier_coeff") != std::string::npos);
    CHECK(what.find("weight") != std::string::npos);
  }
}

TEST_CASE("allocation validation flags misuse") {
  auto s = make_default_scenario(2, 2, 3);
  auto a = Allocation::zero(2, 2);
  a.power(0, 0) = 0.1;  // power without assignment
  auto vs = validate_allocation(s, a);
  REQUIRE(vs.size() == 1);

  a = Allocation::zero(2, 2);
  a.assignment(0, 0) = 1;
  a.assignment(1, 0) = 1;  // shared subchannel
  CHECK(validate_allocation(s, a).size() == 1);

  a = Allocation::zero(2, 2);
  a.cpu_freq[1] = 2.0 * s.users[1].max_cpu_freq;
  CHECK(validate_allocation(s, a).size() == 1);
}
