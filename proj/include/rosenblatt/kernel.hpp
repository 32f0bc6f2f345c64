#pragma once

#include <span>
#include <vector>

#include "rosenblatt/gamma_domain.hpp"

namespace rosenblatt {

inline constexpr int kMaxConstantOrder = 6;

/// A_gamma from the permutation-sum formula, normalized so that E[Z(1)^2] = 1.
/// Requires gamma strictly inside the region and q <= 6.
double normalizing_constant(const GammaVector& gamma);
double normalizing_constant_sq(const GammaVector& gamma);

/// Immutable description of f_gamma on the horizon [0, t].
class KernelSpec {
 public:
  KernelSpec(GammaVector gamma, double horizon);

  const GammaVector& gamma() const noexcept { return gamma_; }
  int order() const noexcept { return gamma_.order(); }
  double horizon() const noexcept { return horizon_; }
  double constant() const noexcept { return constant_; }

 private:
  GammaVector gamma_;
  double horizon_;
  double constant_;
};

enum class KernelMode { Raw, Symmetrized };

/// f_gamma(x) = A int_0^t prod_i (s - x_i)_+^{gamma_i} ds by adaptive quadrature.
double eval_kernel(const KernelSpec& spec, std::span<const double> x,
                   KernelMode mode = KernelMode::Raw);

/// ||f||^2 (raw) or ||f~||^2 (symmetrized) on the spec's horizon. The
/// x-integrals reduce to cross integrals, leaving c |s2 - s1|^e over the square.
double kernel_norm_sq(const KernelSpec& spec, KernelMode mode);

struct FaceRatioRow {
  double epsilon = 0.0;
  double ratio = 0.0;   // A^2 / (-1 - 2 gamma_1)
  double target = 0.0;  // A^2 of the tail vector
  double gap = 0.0;     // |ratio - target| / target
};

/// Ratios along gamma_1 = -1/2 - eps with the remaining coordinates fixed.
std::vector<FaceRatioRow> constant_face_ratio(const GammaVector& base,
                                              const std::vector<double>& epsilons);

struct ScaledKernel {
  KernelSpec spec;
  /// f_{gamma, c t}(c x) = c^{kernel_exponent} f_{gamma, t}(x)
  double kernel_exponent;
  /// Z(c t) has the law of c^{process_exponent} Z(t)
  double process_exponent;
};

ScaledKernel scaling_map(const KernelSpec& spec, double c);

}  // namespace rosenblatt
