#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "rosenblatt/error.hpp"
#include "rosenblatt/statistics.hpp"

using namespace rosenblatt;

TEST_CASE("two-sample KS on hand-checked batches") {
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{4, 5, 6};
  CHECK(ks_two_sample(a, b, 0).value == 1.0);
  CHECK(ks_two_sample(std::vector<double>{1, 3}, std::vector<double>{2, 4}, 0).value == doctest::Approx(0.5));
  CHECK(ks_two_sample(a, a, 20).value == 0.0);
  std::vector<double> shuffled{3, 1, 2};
  CHECK(ks_two_sample(a, shuffled, 0).value == 0.0);
  CHECK_THROWS_AS(ks_two_sample(a, std::vector<double>{}, 0), Error);
}

TEST_CASE("one-sample KS of normal draws against the normal CDF") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  std::vector<double> v(10000);
  for (double& x : v) x = n(rng);
  const auto ks = ks_one_sample(v, standard_normal_cdf, 50);
  CHECK(ks.value < 0.02);
  CHECK(ks.se > 0.0);
  CHECK(ks.se < 0.01);
  // single point at the median: sup is 1/2
  CHECK(ks_one_sample(std::vector<double>{0.0}, standard_normal_cdf, 0).value == doctest::Approx(0.5));
}

TEST_CASE("Kolmogorov distribution and null quantiles") {
  // tabulated asymptotic critical values
  CHECK(kolmogorov_cdf(1.3580986393225507) == doctest::Approx(0.95).epsilon(1e-6));
  CHECK(kolmogorov_cdf(1.2238478702170823) == doctest::Approx(0.90).epsilon(1e-6));
  CHECK(kolmogorov_cdf(1.0 - 1e-12) == doctest::Approx(kolmogorov_cdf(1.0 + 1e-12)).epsilon(1e-9));
  CHECK(ks_null_quantile(100, 0) == doctest::Approx(0.13580986393225507).epsilon(1e-6));
  CHECK(ks_null_quantile(5000, 5000) == doctest::Approx(1.3580986393225507 * std::sqrt(2.0 / 5000)).epsilon(1e-6));
  CHECK_THROWS_AS(ks_null_quantile(0, 0), Error);
}

TEST_CASE("raw moments with standard errors") {
  const std::vector<double> v{1, 2, 3};
  const auto m1 = raw_moment(v, 1);
  CHECK(m1.value == doctest::Approx(2.0));
  CHECK(m1.se == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(raw_moment(v, 2).value == doctest::Approx(14.0 / 3.0));
  CHECK_THROWS_AS(raw_moment(std::vector<double>{}, 2), Error);
}

TEST_CASE("line fit with Student-t interval") {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{1, 3, 5.5, 6.5};
  const auto fit = fit_line(x, y);
  // residuals -0.15, -0.05, 0.55, -0.35
  CHECK(fit.slope == doctest::Approx(1.9));
  CHECK(fit.intercept == doctest::Approx(1.15));
  const double rss = 0.15 * 0.15 + 0.05 * 0.05 + 0.55 * 0.55 + 0.35 * 0.35;
  const double se = std::sqrt(rss / 2.0 / 5.0);
  CHECK(fit.slope_se == doctest::Approx(se));
  CHECK(fit.ci_high - fit.slope == doctest::Approx(4.302652729911275 * se));
  CHECK(fit.r_squared > 0.9);

  const std::vector<double> exact{2, 4, 6, 8};
  const auto perfect = fit_line(x, exact);
  CHECK(perfect.slope == doctest::Approx(2.0));
  CHECK(perfect.ci_high - perfect.ci_low < 1e-9);

  CHECK_THROWS_AS(fit_line(x, std::vector<double>{1, 1, 1, 1}), Error);
  CHECK_THROWS_AS(fit_line(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), Error);
  CHECK_THROWS_AS(fit_line(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Error);
  try {
    fit_line(x, std::vector<double>{1, 1, 1, 1});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FitFailure);
  }
}

TEST_CASE("interval covers the true slope for noisy data") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 0.1);
  int covered = 0;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> x, y;
    for (int i = 0; i < 6; ++i) {
      x.push_back(i);
      y.push_back(0.5 * i + n(rng));
    }
    const auto fit = fit_line(x, y);
    covered += fit.ci_low <= 0.5 && 0.5 <= fit.ci_high;
  }
  CHECK(covered >= 180);
  CHECK(covered <= 199);
}
