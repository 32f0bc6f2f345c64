#include "rosenblatt/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/distributions/students_t.hpp>

#include "rosenblatt/error.hpp"
#include "rosenblatt/parallel.hpp"

namespace rosenblatt {

namespace {

void require_nonempty(std::span<const double> a) {
  if (a.empty()) throw Error(ErrorKind::InvalidInput, "KS statistic needs a nonempty batch");
}

double ks_sorted(const std::vector<double>& a, const std::vector<double>& b) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    best = std::max(best, std::abs(i / na - j / nb));
  }
  return best;
}

double ks_sorted(const std::vector<double>& a, const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(a.size());
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    best = std::max({best, (i + 1) / n - f, f - i / n});
  }
  return best;
}

std::vector<double> sorted(std::span<const double> a) {
  std::vector<double> out(a.begin(), a.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> resample(std::span<const double> a, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, a.size() - 1);
  std::vector<double> out(a.size());
  for (double& v : out) v = a[pick(rng)];
  std::sort(out.begin(), out.end());
  return out;
}

double standard_deviation(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

Estimate ks_two_sample(std::span<const double> a, std::span<const double> b, std::size_t resamples,
                       std::uint64_t seed) {
  require_nonempty(a);
  require_nonempty(b);
  Estimate out;
  out.value = ks_sorted(sorted(a), sorted(b));
  std::mt19937_64 rng(derive_seed(seed, "ks-bootstrap"));
  std::vector<double> boot;
  for (std::size_t k = 0; k < resamples; ++k) boot.push_back(ks_sorted(resample(a, rng), resample(b, rng)));
  out.se = standard_deviation(boot);
  return out;
}

Estimate ks_one_sample(std::span<const double> a, const std::function<double(double)>& cdf,
                       std::size_t resamples, std::uint64_t seed) {
  require_nonempty(a);
  Estimate out;
  out.value = ks_sorted(sorted(a), cdf);
  std::mt19937_64 rng(derive_seed(seed, "ks-bootstrap"));
  std::vector<double> boot;
  for (std::size_t k = 0; k < resamples; ++k) boot.push_back(ks_sorted(resample(a, rng), cdf));
  out.se = standard_deviation(boot);
  return out;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double kolmogorov_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x < 1.0) {
    // small-x form: sqrt(2 pi)/x sum exp(-(2k-1)^2 pi^2 / (8 x^2))
    double total = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double a = (2 * k - 1) * std::numbers::pi;
      total += std::exp(-a * a / (8.0 * x * x));
    }
    return std::sqrt(2.0 * std::numbers::pi) / x * total;
  }
  double total = 0.0;
  for (int k = 1; k <= 100; ++k) {
    total += ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * x * x);
  }
  return 1.0 - 2.0 * total;
}

double ks_null_quantile(std::size_t n, std::size_t m, double level) {
  if (n == 0 || !(level > 0.0 && level < 1.0)) {
    throw Error(ErrorKind::InvalidInput, "KS quantile needs n > 0 and a level in (0, 1)");
  }
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  const double effective = m == 0 ? dn : dn * dm / (dn + dm);
  double lo = 0.0;
  double hi = 5.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_cdf(mid) < level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) / std::sqrt(effective);
}

Estimate raw_moment(std::span<const double> values, int k) {
  if (values.empty()) throw Error(ErrorKind::InvalidInput, "moment of an empty batch");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double x : values) {
    const double p = std::pow(x, k);
    sum += p;
    sum_sq += p * p;
  }
  const double mean = sum / n;
  const double variance = values.size() > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(variance / n)};
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y, double level) {
  if (x.size() != y.size()) throw Error(ErrorKind::InvalidInput, "fit needs equally many x and y");
  if (x.size() < 3) throw Error(ErrorKind::FitFailure, "fit needs at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw Error(ErrorKind::FitFailure, "non-finite fit input");
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::FitFailure, "all x values equal");
  if (!(syy > 0.0)) throw Error(ErrorKind::FitFailure, "all y values equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double rss = std::max(0.0, syy - fit.slope * sxy);
  fit.r_squared = 1.0 - rss / syy;
  fit.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
  const boost::math::students_t dist(n - 2.0);
  const double tq = boost::math::quantile(dist, 0.5 + 0.5 * level);
  fit.ci_low = fit.slope - tq * fit.slope_se;
  fit.ci_high = fit.slope + tq * fit.slope_se;
  return fit;
}

}  // namespace rosenblatt
