#include "rosenblatt/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rosenblatt/error.hpp"
#include "rosenblatt/kernel.hpp"
#include "rosenblatt/quadrature.hpp"
#include "rosenblatt/special_functions.hpp"

namespace rosenblatt {

namespace {

std::vector<int> complement(int n, const std::vector<int>& taken) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (std::find(taken.begin(), taken.end(), i) == taken.end()) out.push_back(i);
  }
  return out;
}

double power(double d, double alpha) { return alpha == 0.0 ? 1.0 : std::pow(d, alpha); }

// Products of several singular factors overflow only at abscissae within
// ~1e-300 of a collapse point, whose quadrature weight is negligible.
double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

std::vector<int> ContractionSpec::I_complement() const { return complement(q, I); }
std::vector<int> ContractionSpec::J_complement() const { return complement(m, psi); }

void check_contraction(const ContractionSpec& spec) {
  if (spec.q < 1 || spec.m < 1) throw Error(ErrorKind::InvalidInput, "contraction orders must be positive");
  if (spec.I.size() != spec.psi.size()) throw Error(ErrorKind::InvalidInput, "I and psi differ in length");
  for (std::size_t k = 0; k < spec.I.size(); ++k) {
    if (spec.I[k] < 0 || spec.I[k] >= spec.q || spec.psi[k] < 0 || spec.psi[k] >= spec.m) {
      throw Error(ErrorKind::InvalidInput, "contraction index out of range");
    }
    if (k > 0 && !(spec.I[k] > spec.I[k - 1])) throw Error(ErrorKind::InvalidInput, "I must be increasing");
    for (std::size_t l = 0; l < k; ++l) {
      if (spec.psi[l] == spec.psi[k]) throw Error(ErrorKind::InvalidInput, "psi is not injective");
    }
  }
}

std::vector<ContractionSpec> enumerate_contractions(int q, int m, int r) {
  if (q < 1 || m < 1 || r < 0 || r > std::min(q, m)) {
    throw Error(ErrorKind::InvalidInput, "need 0 <= r <= min(q, m)");
  }
  std::vector<ContractionSpec> out;
  // subsets of {0..q-1} of size r via a selection mask, in lexicographic order
  std::vector<bool> mask(static_cast<std::size_t>(q), false);
  std::fill(mask.begin(), mask.begin() + r, true);
  do {
    std::vector<int> subset;
    for (int i = 0; i < q; ++i) {
      if (mask[static_cast<std::size_t>(i)]) subset.push_back(i);
    }
    // injections: ordered r-tuples of distinct targets
    std::vector<int> targets(static_cast<std::size_t>(r), 0);
    auto recurse = [&](auto&& self, int depth, std::vector<bool>& used) -> void {
      if (depth == r) {
        out.push_back({q, m, subset, targets});
        return;
      }
      for (int j = 0; j < m; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        used[static_cast<std::size_t>(j)] = true;
        targets[static_cast<std::size_t>(depth)] = j;
        self(self, depth + 1, used);
        used[static_cast<std::size_t>(j)] = false;
      }
    };
    std::vector<bool> used(static_cast<std::size_t>(m), false);
    recurse(recurse, 0, used);
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

double PhiFactors::phi1(double s1, double s2) const {
  if (s2 > s1) return c_plus * power(s2 - s1, alpha1);
  if (s1 > s2) return c_minus * power(s1 - s2, alpha1);
  return alpha1 == 0.0 ? c_plus : std::numeric_limits<double>::infinity();
}

double PhiFactors::phi2(double s1, double s3) const { return coeff2 * power(std::abs(s1 - s3), alpha2); }
double PhiFactors::phi3(double s2, double s4) const { return coeff3 * power(std::abs(s2 - s4), alpha3); }

double PhiFactors::integrand(double s1, double s2, double s3, double s4) const {
  return phi1(s1, s2) * phi1(s3, s4) * phi2(s1, s3) * phi3(s2, s4);
}

PhiFactors phi_factors(const GammaVector& gamma, const ContractionSpec& spec) {
  check_contraction(spec);
  if (spec.q != gamma.order() || spec.m != gamma.order()) {
    throw Error(ErrorKind::InvalidInput, "contraction orders must equal the kernel order");
  }
  const DomainReport report = validate(gamma);
  if (!report.inside) throw Error(ErrorKind::Domain, "gamma outside the admissible region");
  PhiFactors f;
  for (std::size_t k = 0; k < spec.I.size(); ++k) {
    const double gi = gamma[spec.I[k]];
    const double gp = gamma[spec.psi[k]];
    f.alpha1 += gi + gp + 1.0;
    f.c_plus *= beta(gi + 1.0, -gi - gp - 1.0);
    f.c_minus *= beta(gp + 1.0, -gi - gp - 1.0);
  }
  for (int j : spec.I_complement()) {
    f.alpha2 += 2.0 * gamma[j] + 1.0;
    f.coeff2 *= beta(gamma[j] + 1.0, -2.0 * gamma[j] - 1.0);
  }
  for (int k : spec.J_complement()) {
    f.alpha3 += 2.0 * gamma[k] + 1.0;
    f.coeff3 *= beta(gamma[k] + 1.0, -2.0 * gamma[k] - 1.0);
  }
  auto require = [](double alpha, double bound, const char* name) {
    if (!(alpha > bound)) {
      std::ostringstream msg;
      msg << name << " = " << alpha << " is not above " << bound;
      throw Error(ErrorKind::DivergentIntegral, msg.str());
    }
  };
  require(f.alpha1, -1.0, "alpha1");
  require(f.alpha2, -1.0, "alpha2");
  require(f.alpha3, -1.0, "alpha3");
  require(f.exponent_sum(), -3.0, "2 alpha1 + alpha2 + alpha3");
  return f;
}

namespace {

// Cycle coordinates a = s2 - s1, b = s4 - s2, c = s3 - s4 (so s1 - s3 = -(a+b+c));
// s1 is integrated out exactly, leaving the weight 1 - spread of {0, a, a+b, a+b+c}.
double cycle_integral(const PhiFactors& f, const ContractionOptions& options) {
  const quad::Options outer_options{options.tolerance, options.max_refinements};
  const quad::Options middle_options{options.tolerance * 0.1, options.max_refinements};
  const quad::Options inner_options{options.tolerance * 0.01, options.max_refinements};
  auto f1 = [&](double u) {
    return u > 0.0 ? f.c_plus * power(u, f.alpha1) : f.c_minus * power(-u, f.alpha1);
  };

  auto outer = [&](double a, double, double, double, double) {
    if (a == 0.0) return 0.0;
    const double lo = std::max(0.0, a) - 1.0 - a;
    const double hi = std::min(0.0, a) + 1.0 - a;
    std::vector<double> points{lo, hi};
    for (double x : {0.0, -a}) {
      if (x > lo && x < hi) points.push_back(x);
    }
    auto middle = [&](double b, double d_lo, double d_hi, double piece_lo, double piece_hi) {
      double p = a + b;
      if (piece_lo == -a) p = d_lo;
      if (piece_hi == -a) p = -d_hi;
      if (b == 0.0 || p == 0.0) return 0.0;
      const double big = std::max({0.0, a, p});
      const double small = std::min({0.0, a, p});
      double c_lo = big - 1.0 - p;
      const double c_hi = small + 1.0 - p;
      if (options.use_symmetry) c_lo = std::max(c_lo, -a);
      if (!(c_hi > c_lo)) return 0.0;
      std::vector<double> inner_points{c_lo, c_hi};
      for (double x : {0.0, -p, -b}) {
        if (x > c_lo && x < c_hi) inner_points.push_back(x);
      }
      auto inner = [&](double c, double e_lo, double e_hi, double inner_lo, double inner_hi) {
        double s = p + c;
        if (inner_lo == -p) s = e_lo;
        if (inner_hi == -p) s = -e_hi;
        if (c == 0.0 || s == 0.0) return 0.0;
        const double w = 1.0 - (std::max(big, s) - std::min(small, s));
        if (!(w > 0.0)) return 0.0;
        return finite_or_zero(f1(-c) * f.coeff2 * power(std::abs(s), f.alpha2) * w);
      };
      return finite_or_zero(f.coeff3 * power(std::abs(b), f.alpha3) *
                            quad::integrate_pieces(inner, inner_points, inner_options, 2));
    };
    return finite_or_zero(f1(a) * quad::integrate_pieces(middle, points, middle_options, 1));
  };
  const double total = quad::integrate_pieces(outer, {-1.0, 0.0, 1.0}, outer_options, 0);
  return options.use_symmetry ? 2.0 * total : total;
}

}  // namespace

namespace {

// int_{[0,1]^2} c_plus (y-x)_+^a + c_minus (x-y)_+^a
double square_integral(double c_plus, double c_minus, double a) {
  return (c_plus + c_minus) / ((a + 1.0) * (a + 2.0));
}

}  // namespace

double contraction_integral(const GammaVector& gamma, const ContractionSpec& spec,
                            const ContractionOptions& options) {
  const PhiFactors phi = phi_factors(gamma, spec);
  if (options.factorize) {
    if (phi.alpha2 == 0.0 && phi.alpha3 == 0.0) {
      const double one = square_integral(phi.c_plus, phi.c_minus, phi.alpha1);
      return phi.coeff2 * phi.coeff3 * one * one;
    }
    if (phi.alpha1 == 0.0 && phi.c_plus == phi.c_minus) {
      return phi.c_plus * phi.c_plus * square_integral(phi.coeff2, phi.coeff2, phi.alpha2) *
             square_integral(phi.coeff3, phi.coeff3, phi.alpha3);
    }
  }
  return cycle_integral(phi, options);
}

double contraction_norm_sq(const GammaVector& gamma, const ContractionSpec& spec,
                           const ContractionOptions& options) {
  const double a2 = normalizing_constant_sq(gamma);
  return a2 * a2 * contraction_integral(gamma, spec, options);
}

std::vector<TrendRow> ncl_condition_ii_trend(const BoundaryPath& path, const ContractionSpec& spec,
                                             const ContractionOptions& options) {
  if (path.face != Face::FirstExponentToHalf) {
    throw Error(ErrorKind::InvalidInput, "condition (ii) trend needs a first-face path");
  }
  check_contraction(spec);
  const auto it = std::find(spec.I.begin(), spec.I.end(), 0);
  if (it == spec.I.end() || spec.psi[static_cast<std::size_t>(it - spec.I.begin())] == 0) {
    throw Error(ErrorKind::InvalidInput, "condition (ii) applies to specs with 1 in I and psi(1) != 1");
  }
  std::vector<TrendRow> rows;
  for (const auto& gamma : path_points(path)) {
    const double scale = -1.0 - 2.0 * gamma[0];
    const double value = scale * scale * contraction_integral(gamma, spec, options);
    rows.push_back({-0.5 - gamma[0], value, 0.0, 0.0});
  }
  for (auto& row : rows) row.gap = row.value / rows.front().value;
  return rows;
}

ConditionIIILimit ncl_condition_iii_limit(const BoundaryPath& path, const ContractionSpec& tail_spec,
                                          const ContractionOptions& options) {
  if (path.face != Face::FirstExponentToHalf) {
    throw Error(ErrorKind::InvalidInput, "condition (iii) limit needs a first-face path");
  }
  const int q = path.base.order() + 1;
  if (tail_spec.q != q - 1 || tail_spec.m != q - 1) {
    throw Error(ErrorKind::InvalidInput, "tail spec must have orders q - 1");
  }
  check_contraction(tail_spec);
  ContractionSpec spec{q, q, {0}, {0}};
  for (std::size_t k = 0; k < tail_spec.I.size(); ++k) {
    spec.I.push_back(tail_spec.I[k] + 1);
    spec.psi.push_back(tail_spec.psi[k] + 1);
  }
  ConditionIIILimit out;
  out.target = contraction_norm_sq(path.base, tail_spec, options);
  for (const auto& gamma : path_points(path)) {
    const double value = contraction_norm_sq(gamma, spec, options);
    out.rows.push_back({-0.5 - gamma[0], value, out.target, std::abs(value - out.target) / out.target});
  }
  out.final_gap = out.rows.empty() ? 0.0 : out.rows.back().gap;
  return out;
}

CltNormBound clt_norm_bound(const GammaVector& gamma, const ContractionSpec& spec,
                            const ContractionOptions& options) {
  if (spec.r() < 1 || spec.r() > spec.q - 1) {
    throw Error(ErrorKind::InvalidInput, "the CLT bound needs 1 <= r <= q - 1");
  }
  CltNormBound out;
  out.factors = phi_factors(gamma, spec);
  out.exponent_sum = out.factors.exponent_sum();
  const double a2 = normalizing_constant_sq(gamma);
  out.norm_sq = a2 * a2 * cycle_integral(out.factors, options);
  return out;
}

double condition_i_norm_sq(const GammaVector& gamma, double a, double b) {
  const int q = gamma.order();
  if (q < 2) throw Error(ErrorKind::Size, "condition (i) needs q >= 2");
  if (!(a >= 0.0 && a < b && b <= 1.0)) throw Error(ErrorKind::InvalidInput, "need 0 <= a < b <= 1");
  const double a2 = normalizing_constant_sq(gamma);
  const double e = gamma[0] + 1.0;
  double coeff = 1.0;
  double alpha = 0.0;
  for (int j = 1; j < q; ++j) {
    coeff *= beta(gamma[j] + 1.0, -2.0 * gamma[j] - 1.0);
    alpha += 2.0 * gamma[j] + 1.0;
  }
  // u(s) = int_a^b (s - xi)_+^{gamma_1} dxi
  auto u = [&](double s) {
    const double upper = s > a ? std::pow(s - a, e) : 0.0;
    const double lower = s > b ? std::pow(s - b, e) : 0.0;
    return (upper - lower) / e;
  };
  const quad::Options outer_options{1e-9, 10};
  const quad::Options inner_options{1e-10, 10};
  auto outer = [&](double s1, double, double, double, double) {
    const double u1 = u(s1);
    if (u1 == 0.0) return 0.0;
    auto inner = [&](double s2, double d_lo, double d_hi, double lo, double hi) {
      double d = std::abs(s2 - s1);
      if (lo == s1) d = d_lo;
      if (hi == s1) d = d_hi;
      if (d == 0.0) return 0.0;
      return u(s2) * std::pow(d, alpha);
    };
    return u1 * quad::integrate_pieces(inner, {0.0, a, b, s1, 1.0}, inner_options, 1);
  };
  return a2 * coeff * quad::integrate_pieces(outer, {0.0, a, b, 1.0}, outer_options, 0);
}

}  // namespace rosenblatt
