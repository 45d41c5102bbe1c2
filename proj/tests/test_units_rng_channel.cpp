#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cemax/channel.hpp"
#include "cemax/rng.hpp"
#include "cemax/units.hpp"

using namespace cemax;

TEST_CASE("SI quantity parsing") {
  CHECK(parse_si("2MHz") == 2e6);
  CHECK(parse_si("50mW") == Catch::Approx(0.05));
  CHECK(parse_si("1nW") == Catch::Approx(1e-9));
  CHECK(parse_si("1s") == 1.0);
  CHECK(parse_si("20kbps") == 2e4);
  CHECK(parse_si("100MHz") == 1e8);
  CHECK(parse_si("1e-24") == 1e-24);
  CHECK(parse_si("3") == 3.0);
  CHECK(parse_si("2 MHz") == 2e6);
  CHECK_THROWS_AS(parse_si("fast"), Error);
  CHECK_THROWS_AS(parse_si("3 furlongs"), Error);
}

TEST_CASE("12-significant-digit formatting") {
  CHECK(format_sig12(1.0) == "1");
  CHECK(format_sig12(0.05) == "0.05");
  CHECK(format_sig12(123456789.123456789) == "123456789.123");
}

TEST_CASE("unit exponential stream is a pure function of (seed, k, n)") {
  const double a = unit_exponential(42, 3, 5);
  CHECK(a == unit_exponential(42, 3, 5));
  CHECK(a != unit_exponential(42, 5, 3));
  CHECK(a != unit_exponential(43, 3, 5));
  CHECK(a > 0.0);
}

TEST_CASE("sampled gain matrices are bit-identical across calls") {
  ChannelConfig cfg{1e-4, 12345};
  auto g1 = sample_gains(cfg, 2, 4);
  auto g2 = sample_gains(cfg, 2, 4);
  REQUIRE(g1 == g2);
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t n = 0; n < 4; ++n) CHECK(g1(k, n) > 0.0);
  }
}

TEST_CASE("sample mean of a large matrix matches the configured mean") {
  // mean of 1e6 unit-exponential draws: standard error 1e-3, so 1% is a
  // ten-sigma band
  ChannelConfig cfg{1e-4, 7};
  auto g = sample_gains(cfg, 1, 1000000);
  double sum = 0.0;
  for (double v : g.data()) sum += v;
  const double mean = sum / 1e6;
  CHECK(mean == Catch::Approx(cfg.mean_gain).epsilon(0.01));
}

TEST_CASE("empirical mean within three standard errors at 1e5 samples") {
  ChannelConfig cfg{2.5e-4, 99};
  const std::size_t n = 100000;
  auto g = sample_gains(cfg, 1, n);
  double sum = 0.0;
  for (double v : g.data()) sum += v;
  const double mean = sum / static_cast<double>(n);
  const double se = cfg.mean_gain / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(mean - cfg.mean_gain) < 3.0 * se);
}

TEST_CASE("zero dimensions are rejected") {
  ChannelConfig cfg;
  CHECK_THROWS_AS(sample_gains(cfg, 0, 4), Error);
  CHECK_THROWS_AS(sample_gains(cfg, 2, 0), Error);
  try {
    sample_gains(cfg, 0, 4);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroDimension);
  }
}

TEST_CASE("non-positive mean gain is rejected") {
  CHECK_THROWS_AS(sample_gains(ChannelConfig{0.0, 1}, 2, 2), Error);
}
