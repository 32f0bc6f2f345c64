#include "rosenblatt/wick.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rosenblatt/error.hpp"

namespace rosenblatt {

WickExpression WickExpression::constant(int variables, double value) {
  WickExpression out(variables);
  out.add(Monomial(static_cast<std::size_t>(variables), 0), value);
  return out;
}

WickExpression WickExpression::variable(int variables, int index) {
  if (index < 0 || index >= variables) throw Error(ErrorKind::InvalidInput, "variable index out of range");
  Monomial powers(static_cast<std::size_t>(variables), 0);
  powers[static_cast<std::size_t>(index)] = 1;
  WickExpression out(variables);
  out.add(powers, 1.0);
  return out;
}

int WickExpression::degree() const {
  int best = 0;
  for (const auto& [powers, c] : terms_) {
    best = std::max(best, std::accumulate(powers.begin(), powers.end(), 0));
  }
  return best;
}

void WickExpression::add(const Monomial& powers, double coefficient) {
  if (static_cast<int>(powers.size()) != variables_) {
    throw Error(ErrorKind::InvalidInput, "monomial length does not match the variable count");
  }
  if (coefficient == 0.0) return;
  terms_[powers] += coefficient;
}

WickExpression& WickExpression::operator+=(const WickExpression& other) {
  if (other.variables_ != variables_) throw Error(ErrorKind::InvalidInput, "variable count mismatch");
  for (const auto& [powers, c] : other.terms_) terms_[powers] += c;
  return *this;
}

WickExpression& WickExpression::operator-=(const WickExpression& other) {
  if (other.variables_ != variables_) throw Error(ErrorKind::InvalidInput, "variable count mismatch");
  for (const auto& [powers, c] : other.terms_) terms_[powers] -= c;
  return *this;
}

WickExpression& WickExpression::operator*=(double factor) {
  for (auto& [powers, c] : terms_) c *= factor;
  return *this;
}

WickExpression operator*(const WickExpression& a, const WickExpression& b) {
  if (a.variables_ != b.variables_) throw Error(ErrorKind::InvalidInput, "variable count mismatch");
  WickExpression out(a.variables_);
  WickExpression::Monomial powers(static_cast<std::size_t>(a.variables_));
  for (const auto& [pa, ca] : a.terms_) {
    for (const auto& [pb, cb] : b.terms_) {
      for (std::size_t j = 0; j < powers.size(); ++j) powers[j] = pa[j] + pb[j];
      out.terms_[powers] += ca * cb;
    }
  }
  return out;
}

namespace {

// sum over perfect matchings of prod cov(factor_a, factor_b)
double matching_sum(std::vector<int>& factors, double variance) {
  if (factors.empty()) return 1.0;
  if (factors.size() % 2 == 1) return 0.0;
  const int first = factors.back();
  factors.pop_back();
  double total = 0.0;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (factors[k] != first) continue;
    std::vector<int> rest = factors;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
    total += variance * matching_sum(rest, variance);
  }
  factors.push_back(first);
  return total;
}

}  // namespace

double wick_moment(const WickExpression& expr, double variance) {
  if (expr.degree() > kMaxWickDegree) {
    throw Error(ErrorKind::Size, "Wick moments are limited to degree 8");
  }
  double total = 0.0;
  for (const auto& [powers, c] : expr.terms()) {
    std::vector<int> factors;
    for (std::size_t j = 0; j < powers.size(); ++j) {
      for (int k = 0; k < powers[j]; ++k) factors.push_back(static_cast<int>(j));
    }
    total += c * matching_sum(factors, variance);
  }
  return total;
}

Tensor::Tensor(int order_, int n_) : order(order_), n(n_) {
  if (order < 0 || n < 1) throw Error(ErrorKind::InvalidInput, "tensor needs order >= 0 and n >= 1");
  std::size_t count = 1;
  for (int k = 0; k < order; ++k) count *= static_cast<std::size_t>(n);
  values.assign(count, 0.0);
}

Tensor Tensor::random(int order, int n, std::mt19937_64& rng) {
  Tensor t(order, n);
  std::normal_distribution<double> normal;
  for (double& v : t.values) v = normal(rng);
  return t;
}

namespace {

std::size_t flatten(const Tensor& t, std::span<const int> index) {
  if (static_cast<int>(index.size()) != t.order) throw Error(ErrorKind::InvalidInput, "index rank mismatch");
  std::size_t flat = 0;
  for (int k : index) {
    if (k < 0 || k >= t.n) throw Error(ErrorKind::InvalidInput, "tensor index out of range");
    flat = flat * static_cast<std::size_t>(t.n) + static_cast<std::size_t>(k);
  }
  return flat;
}

bool has_repeat(const std::vector<int>& index) {
  for (std::size_t a = 0; a < index.size(); ++a) {
    for (std::size_t b = a + 1; b < index.size(); ++b) {
      if (index[a] == index[b]) return true;
    }
  }
  return false;
}

}  // namespace

double& Tensor::operator()(std::span<const int> index) { return values[flatten(*this, index)]; }
double Tensor::operator()(std::span<const int> index) const { return values[flatten(*this, index)]; }

std::vector<int> Tensor::unflatten(std::size_t flat) const {
  std::vector<int> index(static_cast<std::size_t>(order));
  for (int k = order - 1; k >= 0; --k) {
    index[static_cast<std::size_t>(k)] = static_cast<int>(flat % static_cast<std::size_t>(n));
    flat /= static_cast<std::size_t>(n);
  }
  return index;
}

Tensor symmetrize(const Tensor& f) {
  Tensor out(f.order, f.n);
  std::vector<int> perm(static_cast<std::size_t>(f.order));
  std::vector<int> permuted(perm.size());
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    const auto index = f.unflatten(flat);
    std::iota(perm.begin(), perm.end(), 0);
    double total = 0.0;
    int count = 0;
    do {
      for (std::size_t k = 0; k < perm.size(); ++k) permuted[k] = index[static_cast<std::size_t>(perm[k])];
      total += f(permuted);
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.values[flat] = total / count;
  }
  return out;
}

Tensor off_diagonal_part(const Tensor& f) {
  Tensor out = f;
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    if (has_repeat(f.unflatten(flat))) out.values[flat] = 0.0;
  }
  return out;
}

WickExpression off_diagonal_integral(const Tensor& f) {
  WickExpression out(f.n);
  WickExpression::Monomial powers(static_cast<std::size_t>(f.n));
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    const auto index = f.unflatten(flat);
    if (has_repeat(index)) continue;
    std::fill(powers.begin(), powers.end(), 0);
    for (int k : index) powers[static_cast<std::size_t>(k)] = 1;
    out.add(powers, f.values[flat]);
  }
  return out;
}

namespace {

// coefficients of the Hermite polynomial He_k(x; v) = :x^k: for Var x = v
std::vector<double> hermite(int k, double variance) {
  std::vector<double> prev{1.0};
  if (k == 0) return prev;
  std::vector<double> cur{0.0, 1.0};
  for (int m = 1; m < k; ++m) {
    // He_{m+1} = x He_m - m v He_{m-1}
    std::vector<double> next(static_cast<std::size_t>(m + 2), 0.0);
    for (std::size_t j = 0; j < cur.size(); ++j) next[j + 1] += cur[j];
    for (std::size_t j = 0; j < prev.size(); ++j) next[j] -= m * variance * prev[j];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

WickExpression wick_integral(const Tensor& f, double variance) {
  WickExpression out(f.n);
  std::vector<int> counts(static_cast<std::size_t>(f.n));
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    if (f.values[flat] == 0.0) continue;
    std::fill(counts.begin(), counts.end(), 0);
    for (int k : f.unflatten(flat)) ++counts[static_cast<std::size_t>(k)];
    WickExpression term = WickExpression::constant(f.n, f.values[flat]);
    for (int j = 0; j < f.n; ++j) {
      const int k = counts[static_cast<std::size_t>(j)];
      if (k == 0) continue;
      const auto coeffs = hermite(k, variance);
      WickExpression poly(f.n);
      WickExpression::Monomial powers(static_cast<std::size_t>(f.n), 0);
      for (std::size_t p = 0; p < coeffs.size(); ++p) {
        powers[static_cast<std::size_t>(j)] = static_cast<int>(p);
        poly.add(powers, coeffs[p]);
      }
      term = term * poly;
    }
    out += term;
  }
  return out;
}

Tensor discrete_contraction(const Tensor& f, const Tensor& g, const ContractionSpec& spec,
                            double h) {
  check_contraction(spec);
  if (spec.q != f.order || spec.m != g.order || f.n != g.n) {
    throw Error(ErrorKind::InvalidInput, "contraction orders do not match the tensors");
  }
  const int r = spec.r();
  const auto ic = spec.I_complement();
  const auto jc = spec.J_complement();
  Tensor out(static_cast<int>(ic.size() + jc.size()), f.n);
  Tensor matched(r, f.n);
  std::vector<int> fi(static_cast<std::size_t>(f.order));
  std::vector<int> gi(static_cast<std::size_t>(g.order));
  const double weight = std::pow(h, r);
  for (std::size_t o = 0; o < out.size(); ++o) {
    const auto free = out.unflatten(o);
    for (std::size_t k = 0; k < ic.size(); ++k) fi[static_cast<std::size_t>(ic[k])] = free[k];
    for (std::size_t k = 0; k < jc.size(); ++k) gi[static_cast<std::size_t>(jc[k])] = free[ic.size() + k];
    double total = 0.0;
    for (std::size_t c = 0; c < matched.size(); ++c) {
      const auto shared = matched.unflatten(c);
      for (int l = 0; l < r; ++l) {
        fi[static_cast<std::size_t>(spec.I[static_cast<std::size_t>(l)])] = shared[static_cast<std::size_t>(l)];
        gi[static_cast<std::size_t>(spec.psi[static_cast<std::size_t>(l)])] = shared[static_cast<std::size_t>(l)];
      }
      total += f(fi) * g(gi);
    }
    out.values[o] = weight * total;
  }
  return out;
}

IsometryCheck discrete_isometry_check(const Tensor& f, double h) {
  if (f.size() > 10000) throw Error(ErrorKind::Size, "isometry check limited to 1e4 tensor entries");
  const WickExpression integral = off_diagonal_integral(f);
  IsometryCheck check;
  check.lhs = wick_moment(integral * integral, h);
  const Tensor sym = symmetrize(off_diagonal_part(f));
  double norm = 0.0;
  for (double v : sym.values) norm += v * v;
  double factorial = 1.0;
  for (int k = 2; k <= f.order; ++k) factorial *= k;
  check.rhs = factorial * std::pow(h, f.order) * norm;
  return check;
}

ProductFormulaCheck discrete_product_formula_check(const Tensor& f, const Tensor& g, double h) {
  if (f.order + g.order > kMaxWickDegree / 2 || f.n != g.n) {
    throw Error(ErrorKind::Size, "product formula check limited to q + m <= 4 on a shared grid");
  }
  const Tensor fo = off_diagonal_part(f);
  const Tensor go = off_diagonal_part(g);
  const WickExpression lhs = off_diagonal_integral(fo) * off_diagonal_integral(go);
  WickExpression rhs(f.n);
  for (int r = 0; r <= std::min(f.order, g.order); ++r) {
    for (const auto& spec : enumerate_contractions(f.order, g.order, r)) {
      rhs += wick_integral(discrete_contraction(fo, go, spec, h), h);
    }
  }
  const WickExpression diff = lhs - rhs;
  return {wick_moment(diff * diff, h), wick_moment(lhs * lhs, h)};
}

}  // namespace rosenblatt
