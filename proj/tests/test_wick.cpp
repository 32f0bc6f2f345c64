#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rosenblatt/error.hpp"
#include "rosenblatt/sampler.hpp"
#include "rosenblatt/wick.hpp"

using namespace rosenblatt;

TEST_CASE("Gaussian moments by matchings") {
  const double v = 0.7;
  const auto w = WickExpression::variable(2, 0);
  const auto u = WickExpression::variable(2, 1);
  CHECK(wick_moment(w * w, v) == doctest::Approx(v));
  CHECK(wick_moment(w * w * w * w, v) == doctest::Approx(3 * v * v));
  CHECK(wick_moment(w * w * w * w * w * w, v) == doctest::Approx(15 * v * v * v));
  CHECK(wick_moment(w * w * u * u, v) == doctest::Approx(v * v));
  CHECK(wick_moment(w * w * w * u, v) == 0.0);
  CHECK(wick_moment(WickExpression::constant(2, 4.0), v) == 4.0);
  auto nine = w;
  for (int k = 0; k < 8; ++k) nine = nine * w;
  CHECK_THROWS_AS(wick_moment(nine, v), Error);
}

TEST_CASE("Hermite products are orthogonal") {
  const double v = 0.3;
  Tensor diag(2, 2);
  diag.values = {1.0, 0.0, 0.0, 0.0};  // :w_0^2:
  const auto h2 = wick_integral(diag, v);
  CHECK(wick_moment(h2, v) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(wick_moment(h2 * h2, v) == doctest::Approx(2 * v * v));
  Tensor cube(3, 2);
  cube.values[0] = 1.0;
  const auto h3 = wick_integral(cube, v);
  CHECK(wick_moment(h3 * h3, v) == doctest::Approx(6 * v * v * v));
  CHECK(wick_moment(h3 * h2, v) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("discrete isometry holds for random tensors") {
  std::mt19937_64 rng(11);
  for (int q : {1, 2, 3}) {
    const auto f = Tensor::random(q, 4, rng);
    const auto check = discrete_isometry_check(f, 0.25);
    CHECK(check.lhs == doctest::Approx(check.rhs).epsilon(1e-12));
  }
  CHECK_THROWS_AS(discrete_isometry_check(Tensor(4, 11), 0.1), Error);
}

TEST_CASE("discrete product formula holds for random tensors") {
  std::mt19937_64 rng(5);
  const int pairs[][2] = {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {1, 3}};
  for (const auto& p : pairs) {
    const auto f = Tensor::random(p[0], 3, rng);
    const auto g = Tensor::random(p[1], 3, rng);
    const auto check = discrete_product_formula_check(f, g, 0.4);
    INFO("q=" << p[0] << " m=" << p[1]);
    CHECK(check.scale > 0.0);
    CHECK(check.residual <= 1e-10 * check.scale);
  }
  CHECK_THROWS_AS(discrete_product_formula_check(Tensor(3, 2), Tensor(2, 2), 0.5), Error);
}

TEST_CASE("discrete contraction shapes and weights") {
  Tensor f(2, 2);
  f.values = {1, 2, 3, 4};
  Tensor g(2, 2);
  g.values = {5, 6, 7, 8};
  const auto full = discrete_contraction(f, g, {2, 2, {0, 1}, {0, 1}}, 0.5);
  CHECK(full.order == 0);
  CHECK(full.values[0] == doctest::Approx(0.25 * (5 + 12 + 21 + 32)));
  // (f (x)_{0->1} g)(a, b) = h sum_k f(k, a) g(b, k)
  const auto one = discrete_contraction(f, g, {2, 2, {0}, {1}}, 0.5);
  const int idx[] = {1, 0};
  CHECK(one(idx) == doctest::Approx(0.5 * (2 * 5 + 4 * 6)));
}

namespace {

GridSpec tiny_grid() {
  GridSpec g;
  g.cells_per_horizon = 4;
  g.buffer_cells = 1;
  g.tail_ratio = 4.0;
  g.log_left_truncation = std::log(8.0);
  g.tail_tolerance = 1.0;
  return g;
}

}  // namespace

TEST_CASE("sampler moments agree with the Wick oracle on a tiny grid") {
  KernelSpec kernel({-0.6, -0.7}, 1.0);
  ChaosSampler sampler(kernel, tiny_grid());
  const int n = static_cast<int>(sampler.noise_dimension());
  MESSAGE("tiny grid cells " << n);
  Tensor f(2, n);
  f.values = sampler.materialize_tensor();
  const auto integral = off_diagonal_integral(f);
  const auto square = integral * integral;
  const double second = wick_moment(square, 1.0);
  const double fourth = wick_moment(square * square, 1.0);
  CHECK(second == doctest::Approx(sampler.exact_second_moment()).epsilon(1e-10));

  const auto values = sampler.sample(200000, 21);
  double s2 = 0, s4 = 0, s8 = 0;
  for (double x : values) {
    s2 += x * x;
    s4 += x * x * x * x;
    s8 += std::pow(x, 8);
  }
  const double count = static_cast<double>(values.size());
  const double m2 = s2 / count;
  const double m4 = s4 / count;
  const double se4 = std::sqrt((s8 / count - m4 * m4) / count);
  CHECK(std::abs(m2 - second) < 4 * std::sqrt((m4 - m2 * m2) / count));
  CHECK(std::abs(m4 - fourth) < 4 * se4);
}
