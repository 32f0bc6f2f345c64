#include "rosenblatt/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rosenblatt/error.hpp"
#include "rosenblatt/quadrature.hpp"
#include "rosenblatt/special_functions.hpp"

namespace rosenblatt {

namespace {

void require_inside(const GammaVector& gamma) {
  const DomainReport report = validate(gamma);
  if (!report.inside) {
    throw Error(ErrorKind::Domain, "gamma outside the admissible region: " + report.violations.front());
  }
}

// sum over permutations sigma of prod_j B(gamma_j + 1, -gamma_j - gamma_{sigma_j} - 1)
double permutation_beta_sum(const GammaVector& gamma) {
  const int q = gamma.order();
  std::vector<int> sigma(static_cast<std::size_t>(q));
  std::iota(sigma.begin(), sigma.end(), 0);
  double total = 0.0;
  do {
    double product = 1.0;
    for (int j = 0; j < q; ++j) {
      const double gj = gamma[j];
      const double gs = gamma[sigma[static_cast<std::size_t>(j)]];
      product *= beta(gj + 1.0, -gj - gs - 1.0);
    }
    total += product;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return total;
}

}  // namespace

double normalizing_constant_sq(const GammaVector& gamma) {
  require_inside(gamma);
  const int q = gamma.order();
  if (q > kMaxConstantOrder) throw Error(ErrorKind::Size, "normalizing constant limited to q <= 6");
  const double e = 2.0 * gamma.sum() + q;
  return (e + 1.0) * (e + 2.0) / (2.0 * permutation_beta_sum(gamma));
}

double normalizing_constant(const GammaVector& gamma) {
  return std::sqrt(normalizing_constant_sq(gamma));
}

KernelSpec::KernelSpec(GammaVector gamma, double horizon)
    : gamma_(std::move(gamma)), horizon_(horizon), constant_(0.0) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw Error(ErrorKind::InvalidInput, "kernel horizon must be positive");
  }
  constant_ = normalizing_constant(gamma_);
}

namespace {

double raw_kernel(const KernelSpec& spec, std::span<const double> x) {
  const int q = spec.order();
  const double t = spec.horizon();
  const double lo = std::max(0.0, *std::max_element(x.begin(), x.end()));
  if (lo >= t) return 0.0;
  std::vector<double> offset(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) offset[static_cast<std::size_t>(i)] = lo - x[static_cast<std::size_t>(i)];
  const auto& gamma = spec.gamma();
  auto integrand = [&](double, double d_lo, double) {
    double value = 1.0;
    for (int i = 0; i < q; ++i) value *= std::pow(offset[static_cast<std::size_t>(i)] + d_lo, gamma[i]);
    return value;
  };
  quad::Options options;
  options.tolerance = 1e-12;
  options.max_refinements = 15;
  return spec.constant() * quad::integrate_piecewise(integrand, {lo, t}, options);
}

}  // namespace

double eval_kernel(const KernelSpec& spec, std::span<const double> x, KernelMode mode) {
  const int q = spec.order();
  if (static_cast<int>(x.size()) != q) {
    throw Error(ErrorKind::InvalidInput, "kernel argument dimension does not match q");
  }
  if (mode == KernelMode::Raw) return raw_kernel(spec, x);
  std::vector<int> perm(static_cast<std::size_t>(q));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> permuted(static_cast<std::size_t>(q));
  double total = 0.0;
  int count = 0;
  do {
    for (int i = 0; i < q; ++i) permuted[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    total += raw_kernel(spec, permuted);
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total / count;
}

double kernel_norm_sq(const KernelSpec& spec, KernelMode mode) {
  const auto& gamma = spec.gamma();
  const int q = spec.order();
  const double t = spec.horizon();
  // For each sigma the x-integral factorizes into prod_j cross(s1, s2, g_j, g_sigma_j),
  // which is c_plus |s2-s1|^e for s2 > s1 and c_minus |s2-s1|^e for s2 < s1.
  std::vector<int> sigma(static_cast<std::size_t>(q));
  std::iota(sigma.begin(), sigma.end(), 0);
  double c_plus = 0.0;
  double c_minus = 0.0;
  int count = 0;
  do {
    double plus = 1.0;
    double minus = 1.0;
    for (int j = 0; j < q; ++j) {
      const double gj = gamma[j];
      const double gs = gamma[sigma[static_cast<std::size_t>(j)]];
      plus *= beta(gj + 1.0, -gj - gs - 1.0);
      minus *= beta(gs + 1.0, -gj - gs - 1.0);
    }
    c_plus += plus;
    c_minus += minus;
    ++count;
    if (mode == KernelMode::Raw) break;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  // int_0^t int_0^t c(s1, s2) |s2 - s1|^e ds2 ds1 = (c_plus + c_minus) t^{e+2} / ((e+1)(e+2))
  const double e = 2.0 * gamma.sum() + q;
  const double integral = (c_plus + c_minus) * std::pow(t, e + 2.0) / ((e + 1.0) * (e + 2.0));
  const double a = spec.constant();
  return a * a * integral / count;
}

std::vector<FaceRatioRow> constant_face_ratio(const GammaVector& base,
                                              const std::vector<double>& epsilons) {
  if (base.order() < 1) {
    throw Error(ErrorKind::Size, "face ratio needs q >= 2 (the tail vector would be empty)");
  }
  BoundaryPath path{Face::FirstExponentToHalf, base, epsilons, 0.0, SplitRule::Proportional};
  const auto points = path_points(path);
  const double target = normalizing_constant_sq(base);
  std::vector<FaceRatioRow> rows;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double eps = epsilons[k];
    const double ratio = normalizing_constant_sq(points[k]) / (-1.0 - 2.0 * points[k][0]);
    rows.push_back({eps, ratio, target, std::abs(ratio - target) / target});
  }
  return rows;
}

ScaledKernel scaling_map(const KernelSpec& spec, double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::InvalidInput, "scaling factor must be positive");
  const double bar = spec.gamma().sum();
  return {KernelSpec(spec.gamma(), spec.horizon() * c), bar + 1.0, bar + 1.0 + spec.order() / 2.0};
}

}  // namespace rosenblatt
