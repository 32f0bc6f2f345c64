#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rosenblatt/contraction.hpp"
#include "rosenblatt/error.hpp"
#include "rosenblatt/kernel.hpp"
#include "rosenblatt/special_functions.hpp"

using namespace rosenblatt;

TEST_CASE("contraction enumeration counts") {
  CHECK(enumerate_contractions(2, 2, 1).size() == 4);
  CHECK(enumerate_contractions(3, 3, 2).size() == 18);
  CHECK(enumerate_contractions(3, 2, 0).size() == 1);
  CHECK(enumerate_contractions(3, 2, 2).size() == 6);
  CHECK_THROWS_AS(enumerate_contractions(2, 2, 3), Error);
  const auto specs = enumerate_contractions(3, 3, 2);
  for (std::size_t a = 0; a < specs.size(); ++a) {
    for (std::size_t b = a + 1; b < specs.size(); ++b) CHECK_FALSE(specs[a] == specs[b]);
  }
}

TEST_CASE("malformed contractions are rejected") {
  CHECK_THROWS_AS(check_contraction({2, 2, {0, 1}, {1, 1}}), Error);
  CHECK_THROWS_AS(check_contraction({2, 2, {1, 0}, {0, 1}}), Error);
  CHECK_THROWS_AS(check_contraction({2, 2, {0}, {2}}), Error);
  CHECK_NOTHROW(check_contraction({2, 3, {1}, {2}}));
}

TEST_CASE("phi exponents") {
  const auto phi = phi_factors(GammaVector{-0.7, -0.7}, {2, 2, {0}, {0}});
  CHECK(phi.alpha1 == doctest::Approx(-0.4));
  CHECK(phi.alpha2 == doctest::Approx(-0.4));
  CHECK(phi.alpha3 == doctest::Approx(-0.4));
  CHECK(phi.exponent_sum() == doctest::Approx(-1.6));
  CHECK_THROWS_AS(phi_factors(GammaVector{-0.4, -0.7}, {2, 2, {0}, {0}}), Error);
}

TEST_CASE("empty and full contractions reduce to closed forms") {
  for (const GammaVector& g : {GammaVector{-0.6, -0.7}, GammaVector{-0.74, -0.74},
                               GammaVector{-0.55, -0.65, -0.75}}) {
    const int q = g.order();
    const double raw = kernel_norm_sq(KernelSpec(g, 1.0), KernelMode::Raw);
    std::vector<int> all(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) all[static_cast<std::size_t>(i)] = i;
    const double full = contraction_norm_sq(g, {q, q, all, all});
    CHECK(full == doctest::Approx(raw * raw).epsilon(1e-8));
    const double empty = contraction_norm_sq(g, {q, q, {}, {}});
    CHECK(empty == doctest::Approx(raw * raw).epsilon(1e-8));
  }
  ContractionOptions quadrature;
  quadrature.factorize = false;
  const GammaVector g{-0.6, -0.7};
  const double raw = kernel_norm_sq(KernelSpec(g, 1.0), KernelMode::Raw);
  CHECK(contraction_norm_sq(g, {2, 2, {0, 1}, {0, 1}}, quadrature) ==
        doctest::Approx(raw * raw).epsilon(1e-5));
  CHECK(contraction_norm_sq(g, {2, 2, {}, {}}, quadrature) == doctest::Approx(raw * raw).epsilon(1e-5));
}

TEST_CASE("q = 2 contraction against plain Monte Carlo") {
  const GammaVector g{-0.6, -0.7};
  const ContractionSpec spec{2, 2, {0}, {1}};
  const auto phi = phi_factors(g, spec);
  const double value = contraction_integral(g, spec);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = 10'000'000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s1 = u(rng), s2 = u(rng), s3 = u(rng), s4 = u(rng);
    const double f = phi.integrand(s1, s2, s3, s4);
    sum += f;
    sum_sq += f * f;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  MESSAGE("quadrature " << value << " monte carlo " << mean << " +- " << se);
  CHECK(std::abs(value - mean) < 3 * se);
}

TEST_CASE("symmetric and direct integration agree") {
  const GammaVector g{-0.55, -0.65, -0.75};
  const ContractionSpec spec{3, 3, {0, 1}, {1, 0}};
  ContractionOptions direct;
  direct.use_symmetry = false;
  CHECK(contraction_integral(g, spec) ==
        doctest::Approx(contraction_integral(g, spec, direct)).epsilon(1e-6));
}

TEST_CASE("condition (ii) trend decreases toward the first face") {
  BoundaryPath path{Face::FirstExponentToHalf, GammaVector{-0.7}, {0.1, 0.01, 0.001}, 0.0,
                    SplitRule::Proportional};
  const auto rows = ncl_condition_ii_trend(path, {2, 2, {0}, {1}});
  REQUIRE(rows.size() == 3);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    MESSAGE("eps " << rows[k].epsilon << " value " << rows[k].value << " gap " << rows[k].gap);
    CHECK(rows[k].value < rows[k - 1].value);
  }
  CHECK_THROWS_AS(ncl_condition_ii_trend(path, {2, 2, {1}, {1}}), Error);

  BoundaryPath path3{Face::FirstExponentToHalf, GammaVector{-0.6, -0.7}, {0.1, 0.01}, 0.0,
                     SplitRule::Proportional};
  const auto rows3 = ncl_condition_ii_trend(path3, {3, 3, {0}, {1}});
  CHECK(rows3[1].value < rows3[0].value);
}

TEST_CASE("condition (iii) contraction converges to the tail norm") {
  BoundaryPath path{Face::FirstExponentToHalf, GammaVector{-0.7}, {0.1, 0.01, 0.001}, 0.0,
                    SplitRule::Proportional};
  const auto limit = ncl_condition_iii_limit(path, {1, 1, {}, {}});
  const double g_norm = kernel_norm_sq(KernelSpec(GammaVector{-0.7}, 1.0), KernelMode::Raw);
  CHECK(limit.target == doctest::Approx(g_norm * g_norm).epsilon(1e-8));
  for (std::size_t k = 1; k < limit.rows.size(); ++k) {
    MESSAGE("eps " << limit.rows[k].epsilon << " gap " << limit.rows[k].gap);
    CHECK(limit.rows[k].gap < limit.rows[k - 1].gap);
  }
  CHECK(limit.final_gap <= 0.05);

  const auto full = ncl_condition_iii_limit(path, {1, 1, {0}, {0}});
  CHECK(full.final_gap <= 0.05);
}

TEST_CASE("CLT contraction norms shrink toward the second face") {
  const ContractionSpec spec{2, 2, {0}, {0}};
  const auto interior = clt_norm_bound(GammaVector{-0.7, -0.7}, spec);
  CHECK(interior.exponent_sum == doctest::Approx(-1.6));
  BoundaryPath path{Face::SumToCriticalValue, GammaVector{-0.7, -0.7}, {0.1, 0.02}, 0.0,
                    SplitRule::Proportional};
  const auto points = path_points(path);
  const double far = clt_norm_bound(points[0], spec).norm_sq;
  const double near = clt_norm_bound(points[1], spec).norm_sq;
  MESSAGE("norms " << far << " " << near);
  CHECK(near < far);
  CHECK_THROWS_AS(clt_norm_bound(GammaVector{-0.7, -0.7}, {2, 2, {0, 1}, {0, 1}}), Error);
}

TEST_CASE("condition (i) norm vanishes with the interval") {
  const GammaVector g{-0.6, -0.7};
  double previous = condition_i_norm_sq(g, 0.2, 0.4);
  for (double width : {0.05, 0.01, 0.001}) {
    const double value = condition_i_norm_sq(g, 0.2, 0.2 + width);
    CHECK(value < previous);
    previous = value;
  }
  CHECK(previous < 1e-3);
}
