#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rosenblatt/error.hpp"
#include "rosenblatt/grid.hpp"

using namespace rosenblatt;

TEST_CASE("default grids") {
  CHECK(default_grid(2).cells_per_horizon == 4096);
  CHECK(default_grid(3).cells_per_horizon == 1024);
  CHECK(default_grid(2, 2.0).mesh() == doctest::Approx(2.0 / 4096));
}

TEST_CASE("tail mass decreases in L and the required L meets the tolerance") {
  const GammaVector g{-0.6, -0.7};
  double previous = tail_mass_fraction(g, 1.0, 0.0);
  for (double log_l = 1.0; log_l < 20.0; log_l += 1.0) {
    const double mass = tail_mass_fraction(g, 1.0, log_l);
    CHECK(mass < previous);
    previous = mass;
  }
  const double needed = required_log_left_truncation(g, 1.0, 1e-3);
  CHECK(tail_mass_fraction(g, 1.0, needed) <= 1e-3 * (1 + 1e-9));
  CHECK(tail_mass_fraction(g, 1.0, needed - 0.01) > 1e-3);

  // close to the first face the required window is astronomically wide
  const double far = required_log_left_truncation({-0.502, -0.7}, 1.0, 1e-3);
  CHECK(far > 700.0);
  CHECK_THROWS_AS(required_log_left_truncation(g, 1.0, 0.0), Error);
}

TEST_CASE("geometry covers the window without gaps") {
  GridSpec spec;
  spec.cells_per_horizon = 64;
  spec.buffer_cells = 8;
  const GridGeometry geo(spec, std::log(50.0));
  CHECK(geo.uniform_cells() == 72);
  CHECK(geo.left_edge(0) == doctest::Approx(-8.0 / 64));
  CHECK(geo.left_edge(71) + geo.width(71) == doctest::Approx(1.0));
  double right = geo.left_edge(0);
  for (int c = geo.uniform_cells(); c < geo.total_cells(); ++c) {
    CHECK(geo.left_edge(c) + geo.width(c) == doctest::Approx(right).epsilon(1e-12));
    right = geo.left_edge(c);
  }
  CHECK(-geo.left_edge(geo.total_cells() - 1) >= 50.0);
  CHECK(-geo.left_edge(geo.total_cells() - 2) < 50.0);

  // far-face windows stay representable in log form
  const GridGeometry huge(spec, 1500.0);
  CHECK(huge.tail_cells() > 6000);
  CHECK(std::isfinite(huge.scaled_average(huge.total_cells() - 1, 0.5, -0.501)));
  CHECK(huge.scaled_average(huge.total_cells() - 1, 0.5, -0.501) > 0.0);
}

TEST_CASE("scaled cell averages match quadrature") {
  GridSpec spec;
  spec.cells_per_horizon = 16;
  spec.buffer_cells = 2;
  const GridGeometry geo(spec, std::log(30.0));
  const double g = -0.7;
  for (int cell : {0, 1, 5, 9, geo.uniform_cells(), geo.uniform_cells() + 3, geo.total_cells() - 1}) {
    const double a = geo.left_edge(cell);
    const double w = geo.width(cell);
    for (double s : {0.0, 0.31, 0.5, 1.0}) {
      double expected = 0.0;
      if (s > a) {
        if (s > a + w) {
          expected = oracle::gk([&](double x) { return std::pow(s - x, g); }, a, a + w);
        } else {
          expected = std::pow(s - a, g + 1) / (g + 1);
        }
        expected /= std::sqrt(w);
      }
      CHECK(geo.scaled_average(cell, s, g) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("Gauss-Legendre rule on the unit interval") {
  for (int n : {1, 3, 5}) {
    const auto rule = gauss_legendre_unit(n);
    CHECK(rule.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
    for (int k = 0; k < 2 * n; ++k) {
      const double integral = (rule.weights.array() * rule.nodes.array().pow(k)).sum();
      CHECK(integral == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
    CHECK(rule.nodes.minCoeff() > 0.0);
    CHECK(rule.nodes.maxCoeff() < 1.0);
  }
}

TEST_CASE("Chebyshev interpolation of a function analytic near the interval") {
  const auto points = chebyshev_points(48, 0.0, 1.0);
  Eigen::VectorXd targets = Eigen::VectorXd::LinSpaced(101, 0.0, 1.0);
  const auto matrix = chebyshev_interpolation_matrix(points, targets);
  auto f = [](double s) { return std::pow(s + 0.125, -0.7); };
  Eigen::VectorXd values(points.size());
  for (Eigen::Index c = 0; c < points.size(); ++c) values(c) = f(points(c));
  const Eigen::VectorXd interp = matrix * values;
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    CHECK(interp(i) == doctest::Approx(f(targets(i))).epsilon(1e-12));
  }
  CHECK((matrix * Eigen::VectorXd::Ones(points.size())).isApprox(Eigen::VectorXd::Ones(targets.size())));
}
