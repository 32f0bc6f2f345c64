#pragma once

#include <map>
#include <random>
#include <span>
#include <vector>

#include "rosenblatt/contraction.hpp"

namespace rosenblatt {

inline constexpr int kMaxWickDegree = 8;

/// Polynomial in independent centered Gaussians w_0..w_{n-1}, stored as
/// multiplicity vector -> coefficient.
class WickExpression {
 public:
  using Monomial = std::vector<int>;

  explicit WickExpression(int variables = 0) : variables_(variables) {}
  static WickExpression constant(int variables, double value);
  static WickExpression variable(int variables, int index);

  int variables() const noexcept { return variables_; }
  int degree() const;
  const std::map<Monomial, double>& terms() const noexcept { return terms_; }

  void add(const Monomial& powers, double coefficient);

  WickExpression& operator+=(const WickExpression& other);
  WickExpression& operator-=(const WickExpression& other);
  WickExpression& operator*=(double factor);
  friend WickExpression operator+(WickExpression a, const WickExpression& b) { return a += b; }
  friend WickExpression operator-(WickExpression a, const WickExpression& b) { return a -= b; }
  friend WickExpression operator*(WickExpression a, double factor) { return a *= factor; }
  friend WickExpression operator*(const WickExpression& a, const WickExpression& b);

 private:
  int variables_;
  std::map<Monomial, double> terms_;
};

/// E[expr] for Var(w_j) = variance, by summing over perfect matchings of the
/// factors of every monomial. Throws Size above degree 8.
double wick_moment(const WickExpression& expr, double variance);

/// Order-q array over n cells, row-major with the first index slowest.
struct Tensor {
  int order = 0;
  int n = 0;
  std::vector<double> values;

  Tensor() = default;
  Tensor(int order, int n);
  static Tensor random(int order, int n, std::mt19937_64& rng);

  std::size_t size() const noexcept { return values.size(); }
  double& operator()(std::span<const int> index);
  double operator()(std::span<const int> index) const;
  std::vector<int> unflatten(std::size_t flat) const;
};

Tensor symmetrize(const Tensor& f);
/// Copy of f with every entry having a repeated index set to zero.
Tensor off_diagonal_part(const Tensor& f);

/// sum over distinct index tuples of f(j) w_{j_1} ... w_{j_q}
WickExpression off_diagonal_integral(const Tensor& f);
/// sum over all tuples of f(j) :w_{j_1} ... w_{j_q}: (Hermite polynomials on
/// coinciding indices); equals off_diagonal_integral when f has zero diagonals.
WickExpression wick_integral(const Tensor& f, double variance);

/// h^r sum over matched indices; output indices are f's unmatched ones
/// followed by g's unmatched ones.
Tensor discrete_contraction(const Tensor& f, const Tensor& g, const ContractionSpec& spec, double h);

struct IsometryCheck {
  double lhs = 0.0;  // E[(off-diagonal sum)^2]
  double rhs = 0.0;  // q! h^q ||symmetrized off-diagonal f||^2
};
IsometryCheck discrete_isometry_check(const Tensor& f, double h);

struct ProductFormulaCheck {
  double residual = 0.0;  // E[(LHS - RHS)^2]
  double scale = 0.0;     // E[LHS^2]
};
/// LHS = I_q(f) I_m(g) with off-diagonal integrals; RHS = sum over r and all
/// (I, psi) of the Wick integral of the discrete contraction.
ProductFormulaCheck discrete_product_formula_check(const Tensor& f, const Tensor& g, double h);

}  // namespace rosenblatt
