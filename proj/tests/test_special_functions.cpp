#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include <boost/math/special_functions/beta.hpp>

#include "oracles.hpp"
#include "rosenblatt/special_functions.hpp"

using namespace rosenblatt;

namespace {
bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }
}  // namespace

TEST_CASE("beta examples") {
  CHECK(beta(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(beta(0.5, 0.5) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
  const double direct = oracle::left_singular(
      [](double t) { return std::pow(1.0 - t, -0.8); }, 0.0, 0.5, -0.6) +
      oracle::right_singular([](double t) { return std::pow(t, -0.6); }, 0.5, 1.0, -0.8);
  CHECK(close(beta(0.4, 0.2), direct, 1e-10));
  CHECK_THROWS_AS(beta(0.0, 1.0), Error);
  CHECK_THROWS_AS(beta(1.0, -0.5), Error);
}

TEST_CASE("beta agrees with an independent implementation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> logarg(std::log(1e-6), std::log(10.0));
  for (int k = 0; k < 1000; ++k) {
    const double a = std::exp(logarg(rng));
    const double b = std::exp(logarg(rng));
    CHECK(close(beta(a, b), boost::math::beta(a, b), 1e-12));
    CHECK(close(beta(a, b), beta(b, a), 1e-14));
    CHECK(close(beta(a + 1.0, b), beta(a, b) * a / (a + b), 1e-12));
  }
  CHECK(std::isfinite(beta(200.0, 300.0)));
  CHECK(close(beta(200.0, 300.0), boost::math::beta(200.0, 300.0), 1e-10));
}

TEST_CASE("cross integral closed form") {
  CHECK(cross_integral(0.0, 1.0, -0.75, -0.75) == doctest::Approx(boost::math::beta(0.25, 0.5)).epsilon(1e-13));
  CHECK(cross_integral(0.2, 0.7, -0.6, -0.8) == cross_integral(0.7, 0.2, -0.8, -0.6));
  CHECK(close(cross_integral(0.3, 0.9, -0.6, -0.8), oracle::cross(0.3, 0.9, -0.6, -0.8), 1e-8));
  CHECK_THROWS_AS(cross_integral(0.5, 0.5, -0.6, -0.6), Error);
  try {
    cross_integral(0.5, 0.5, -0.6, -0.6);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DivergentIntegral);
  }
  CHECK_THROWS_AS(cross_integral(0.0, 1.0, -0.4, -0.6), Error);
  CHECK_THROWS_AS(cross_integral(0.0, 1.0, -0.6, -1.0), Error);
}

TEST_CASE("cross integral matches quadrature on random admissible tuples") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> g(-0.95, -0.55);
  std::uniform_real_distribution<double> s(0.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const double s1 = s(rng);
    const double s2 = s(rng);
    const double g1 = g(rng);
    const double g2 = g(rng);
    const double value = cross_integral(s1, s2, g1, g2);
    CHECK(value > 0.0);
    CHECK(close(value, oracle::cross(s1, s2, g1, g2), 1e-6));
  }
}

TEST_CASE("small-alpha Beta probe") {
  CHECK(0.1 * beta(0.1, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  const auto probe = beta_small_alpha_probe(0.5, 2.0, {0.1, 0.01, 0.001});
  REQUIRE(probe.rows.size() == 3);
  CHECK(probe.rows[1].sup_deviation < probe.rows[0].sup_deviation);
  CHECK(probe.rows[2].sup_deviation < probe.rows[1].sup_deviation);
  CHECK(probe.monotone_below_b0);
  CHECK(probe.final_below_threshold);

  const auto coarse = beta_small_alpha_probe(0.5, 2.0, {0.5});
  CHECK(coarse.rows[0].sup_deviation > 0.0);
  CHECK(std::isfinite(coarse.rows[0].sup_deviation));

  CHECK_THROWS_AS(beta_small_alpha_probe(0.5, 2.0, {}), Error);
  CHECK_THROWS_AS(beta_small_alpha_probe(0.0, 2.0, {0.1}), Error);
}
