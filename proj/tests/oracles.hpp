#pragma once

#include <cmath>
#include <functional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

// Independent quadrature used only by the tests: 61-point Gauss-Kronrod after
// a power substitution that removes an endpoint singularity.
namespace oracle {

inline double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-12);
}

// int_a^b g(x) (x - a)^p dx, p in (-1, 0], via u = (x - a)^{p+1}
inline double left_singular(const std::function<double(double)>& g, double a, double b, double p) {
  const double e = p + 1.0;
  return gk([&](double u) { return g(a + std::pow(u, 1.0 / e)); }, 0.0, std::pow(b - a, e)) / e;
}

// int_a^b g(x) (b - x)^p dx
inline double right_singular(const std::function<double(double)>& g, double a, double b, double p) {
  const double e = p + 1.0;
  return gk([&](double u) { return g(b - std::pow(u, 1.0 / e)); }, 0.0, std::pow(b - a, e)) / e;
}

// int_R (s1 - x)_+^g1 (s2 - x)_+^g2 dx. With y = s1 - x = d t this is
// d^{g1+g2+1} int_0^inf t^g1 (1 + t)^g2 dt; split at t = 1 and map the
// infinite piece with t = 1/w.
inline double cross(double s1, double s2, double g1, double g2) {
  if (s1 > s2) return cross(s2, s1, g2, g1);
  const double d = s2 - s1;
  const double near = left_singular([&](double t) { return std::pow(1.0 + t, g2); }, 0.0, 1.0, g1);
  const double far = left_singular([&](double w) { return std::pow(1.0 + w, g2); }, 0.0, 1.0,
                                   -2.0 - g1 - g2);
  return std::pow(d, g1 + g2 + 1.0) * (near + far);
}

}  // namespace oracle
