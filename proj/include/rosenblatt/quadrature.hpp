#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace rosenblatt::quad {

struct Options {
  double tolerance = 1e-10;
  std::size_t max_refinements = 10;
};

/// Double-exponential rule for one nesting level. Each level of a nested
/// integral must use its own instance: the rule grows its abscissa tables
/// lazily and is not re-entrant.
inline boost::math::quadrature::tanh_sinh<double>& rule(int level, std::size_t refinements) {
  thread_local std::array<std::unique_ptr<boost::math::quadrature::tanh_sinh<double>>, 6> rules;
  thread_local std::array<std::size_t, 6> built{};
  auto& slot = rules.at(static_cast<std::size_t>(level));
  if (!slot || built[static_cast<std::size_t>(level)] != refinements) {
    slot = std::make_unique<boost::math::quadrature::tanh_sinh<double>>(refinements);
    built[static_cast<std::size_t>(level)] = refinements;
  }
  return *slot;
}

/// Integrates f over [points.front(), points.back()], splitting at every
/// interior point. The integrand is called as f(x, d_lo, d_hi, lo, hi) where
/// [lo, hi] is the current piece and d_lo, d_hi are the distances from x to
/// its ends, computed without cancellation so that endpoint power
/// singularities stay accurate. Callers compare lo/hi against their singular
/// points to recover exact distances.
template <class F>
double integrate_pieces(F&& f, std::vector<double> points, const Options& options = {},
                        int level = 0) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  auto& integrator = rule(level, options.max_refinements);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const double a = points[k];
    const double b = points[k + 1];
    const double width = b - a;
    // pieces this narrow only arise at the far ends of an enclosing rule
    if (!(width > 1e-250)) continue;
    auto piece = [&](double x, double xc) {
      double d_lo;
      double d_hi;
      if (xc < 0) {
        d_lo = -xc;
        d_hi = width - d_lo;
      } else {
        d_hi = xc;
        d_lo = width - d_hi;
      }
      return f(x, d_lo, d_hi, a, b);
    };
    double error = 0.0;
    double l1 = 0.0;
    total += integrator.integrate(piece, a, b, options.tolerance, &error, &l1);
  }
  return total;
}

/// As integrate_pieces with f(x, d_lo, d_hi).
template <class F>
double integrate_piecewise(F&& f, std::vector<double> points, const Options& options = {},
                           int level = 0) {
  return integrate_pieces(
      [&](double x, double d_lo, double d_hi, double, double) { return f(x, d_lo, d_hi); },
      std::move(points), options, level);
}

}  // namespace rosenblatt::quad
