#pragma once

#include <vector>

#include "rosenblatt/gamma_domain.hpp"

namespace rosenblatt {

/// Contraction f (x)_{I,psi} g of an order-q kernel against an order-m kernel.
/// Indices are 0-based: I is an increasing subset of {0..q-1} and psi[k] is
/// the g-coordinate matched with I[k].
struct ContractionSpec {
  int q = 0;
  int m = 0;
  std::vector<int> I;
  std::vector<int> psi;

  int r() const noexcept { return static_cast<int>(I.size()); }
  std::vector<int> J() const { return psi; }
  std::vector<int> I_complement() const;
  std::vector<int> J_complement() const;
  bool is_full() const noexcept { return r() == q && r() == m; }
  bool operator==(const ContractionSpec&) const = default;
};

/// Throws InvalidInput unless psi is an injection I -> {0..m-1}.
void check_contraction(const ContractionSpec& spec);

/// All C(q,r) C(m,r) r! specs of cardinality r.
std::vector<ContractionSpec> enumerate_contractions(int q, int m, int r);

/// Factors of the norm integrand of f_gamma (x)_{I,psi} f_gamma:
///   phi1(s1,s2) = c_plus (s2-s1)_+^alpha1 + c_minus (s1-s2)_+^alpha1
///   phi2(s1,s3) = coeff2 |s1-s3|^alpha2,  phi3(s2,s4) = coeff3 |s2-s4|^alpha3
/// Empty index sets give constant factors 1 with exponent 0.
struct PhiFactors {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  double c_plus = 1.0;
  double c_minus = 1.0;
  double coeff2 = 1.0;
  double coeff3 = 1.0;

  double exponent_sum() const noexcept { return 2.0 * alpha1 + alpha2 + alpha3; }
  double phi1(double s1, double s2) const;
  double phi2(double s1, double s3) const;
  double phi3(double s2, double s4) const;
  /// phi1(s1,s2) phi1(s3,s4) phi2(s1,s3) phi3(s2,s4)
  double integrand(double s1, double s2, double s3, double s4) const;
};

PhiFactors phi_factors(const GammaVector& gamma, const ContractionSpec& spec);

struct ContractionOptions {
  double tolerance = 1e-6;
  std::size_t max_refinements = 8;
  /// Integrate half of the domain and use the (s1,s2) <-> (s3,s4) symmetry.
  bool use_symmetry = true;
  /// Use the product form when one side of the cycle is constant (r = 0 or
  /// r = q = m).
  bool factorize = true;
};

/// int_{[0,1]^4} phi1 phi1 phi2 phi3. Throws DivergentIntegral naming the
/// exponent when the integrand is not integrable.
double contraction_integral(const GammaVector& gamma, const ContractionSpec& spec,
                            const ContractionOptions& options = {});

/// ||f_gamma (x)_{I,psi} f_gamma||^2 = A^4 contraction_integral (horizon 1).
double contraction_norm_sq(const GammaVector& gamma, const ContractionSpec& spec,
                           const ContractionOptions& options = {});

struct TrendRow {
  double epsilon = 0.0;
  double value = 0.0;
  double target = 0.0;
  double gap = 0.0;
};

/// (-1 - 2 gamma_1)^2 times the contraction integral along a first-face path,
/// for specs contracting coordinate 1 with some other coordinate.
std::vector<TrendRow> ncl_condition_ii_trend(const BoundaryPath& path, const ContractionSpec& spec,
                                             const ContractionOptions& options = {});

struct ConditionIIILimit {
  std::vector<TrendRow> rows;
  double target = 0.0;
  double final_gap = 0.0;
};

/// ||f_gamma (x)_{I+{1}, psi+(1->1)} f_gamma||^2 along a first-face path against
/// ||g (x)_{I,psi} g||^2 for g = f_{gamma_2..gamma_q}. `tail_spec` is written
/// in g's coordinates (orders q-1).
ConditionIIILimit ncl_condition_iii_limit(const BoundaryPath& path, const ContractionSpec& tail_spec,
                                          const ContractionOptions& options = {});

struct CltNormBound {
  double norm_sq = 0.0;
  double exponent_sum = 0.0;
  PhiFactors factors;
};

/// Contraction norm for 1 <= r <= q-1 together with 2 alpha1 + alpha2 + alpha3.
CltNormBound clt_norm_bound(const GammaVector& gamma, const ContractionSpec& spec,
                            const ContractionOptions& options = {});

/// || int_a^b f_gamma(xi, .) dxi ||^2 over the remaining q-1 coordinates.
double condition_i_norm_sq(const GammaVector& gamma, double a, double b);

}  // namespace rosenblatt
