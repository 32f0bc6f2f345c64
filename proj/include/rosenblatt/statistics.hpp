#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace rosenblatt {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Sup distance between two empirical CDFs; SE by bootstrap over `resamples`
/// joint resamples of both batches.
Estimate ks_two_sample(std::span<const double> a, std::span<const double> b,
                       std::size_t resamples = 200, std::uint64_t seed = 0);

/// Sup distance between the empirical CDF of `a` and `cdf`.
Estimate ks_one_sample(std::span<const double> a, const std::function<double(double)>& cdf,
                       std::size_t resamples = 200, std::uint64_t seed = 0);

double standard_normal_cdf(double x);

/// Limiting Kolmogorov distribution P(sqrt(n_eff) D <= x).
double kolmogorov_cdf(double x);
/// Asymptotic `level` quantile of the KS distance for batch sizes n and m
/// (m = 0 for the one-sample statistic).
double ks_null_quantile(std::size_t n, std::size_t m, double level = 0.95);

/// Sample mean of x^k with its standard error.
Estimate raw_moment(std::span<const double> values, int k);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Ordinary least squares y = a + b x with a Student-t interval for b.
/// Throws FitFailure when x or y are degenerate or fewer than 3 points.
LinearFit fit_line(std::span<const double> x, std::span<const double> y, double level = 0.95);

}  // namespace rosenblatt
