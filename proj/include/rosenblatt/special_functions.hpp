#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "rosenblatt/error.hpp"

namespace rosenblatt {

/// Euler Beta function for positive arguments. Uses the Gamma ratio while it
/// is representable and falls back to log-Gamma for large arguments.
template <typename Scalar>
Scalar beta(Scalar a, Scalar b) {
  using std::exp;
  using std::lgamma;
  using std::tgamma;
  if (!(a > Scalar(0)) || !(b > Scalar(0))) {
    throw Error(ErrorKind::Domain, "beta requires positive arguments");
  }
  if (a + b < Scalar(150)) {
    return tgamma(a) * tgamma(b) / tgamma(a + b);
  }
  return exp(lgamma(a) + lgamma(b) - lgamma(a + b));
}

/// Closed form of  int_R (s1 - x)_+^g1 (s2 - x)_+^g2 dx  for exponents in
/// (-1, -1/2). Exactly one of the two Beta terms survives.
template <typename Scalar>
Scalar cross_integral(Scalar s1, Scalar s2, Scalar g1, Scalar g2) {
  using std::pow;
  auto admissible = [](Scalar g) { return g > Scalar(-1) && g < Scalar(-0.5); };
  if (!admissible(g1) || !admissible(g2)) {
    throw Error(ErrorKind::Domain, "cross_integral exponents must lie in (-1, -1/2)");
  }
  if (s1 == s2) {
    throw Error(ErrorKind::DivergentIntegral, "cross_integral diverges at s1 == s2");
  }
  const Scalar e = Scalar(1) + g1 + g2;
  if (s2 > s1) return pow(s2 - s1, e) * beta(Scalar(1) + g1, -e);
  return pow(s1 - s2, e) * beta(Scalar(1) + g2, -e);
}

struct BetaProbeRow {
  double alpha = 0.0;
  double sup_deviation = 0.0;
};

struct BetaProbe {
  std::vector<BetaProbeRow> rows;
  /// True when the deviations do not increase along alphas once alpha < b0.
  bool monotone_below_b0 = true;
  bool final_below_threshold = false;
};

/// Tabulates sup over a uniform beta grid in [b0, b1] of |alpha B(alpha, beta) - 1|.
BetaProbe beta_small_alpha_probe(double b0, double b1, const std::vector<double>& alphas,
                                 double threshold = 1e-2, int grid_points = 201);

}  // namespace rosenblatt
