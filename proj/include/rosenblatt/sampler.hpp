#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rosenblatt/grid.hpp"
#include "rosenblatt/kernel.hpp"

namespace rosenblatt {

inline constexpr int kMaxSampledOrder = 3;

/// Resolves the left truncation of `grid` for `gamma`: fills in ln L when it is
/// NaN, otherwise checks the tail-mass bound and throws GridTooSmall.
GridSpec resolve_grid(const GammaVector& gamma, GridSpec grid);

/// Discretized I_q(f) over one grid. Realization value:
///   sum over q-tuples of distinct cells j of F(j_1..j_q) xi_{j_1} ... xi_{j_q}
/// with xi i.i.d. N(0,1) (one per cell, i.e. Delta W / sqrt(width)) and
/// F(j) = A int_{from}^{to} prod_i sqrt(w_{j_i}) avg_{x in cell j_i} (s - x)_+^{gamma_i} ds,
/// the s-integral taken with Gauss-Legendre nodes in every uniform cell.
class ChaosSampler {
 public:
  /// The s-range is [from, to] (to = NaN means the horizon); both ends are
  /// rounded to the nearest uniform cell boundary.
  ChaosSampler(const KernelSpec& kernel, const GridSpec& grid, double from = 0.0,
               double to = std::numeric_limits<double>::quiet_NaN());
  ~ChaosSampler();
  ChaosSampler(ChaosSampler&&) noexcept;
  ChaosSampler& operator=(ChaosSampler&&) noexcept;

  int order() const noexcept;
  const KernelSpec& kernel() const noexcept;
  const GridSpec& grid() const noexcept;
  const GridGeometry& geometry() const noexcept;
  std::size_t noise_dimension() const noexcept;

  /// Per-thread scratch space (FFT buffers).
  class Workspace;
  std::shared_ptr<Workspace> make_workspace() const;

  void draw_noise(std::uint64_t seed, std::uint64_t index, std::span<double> xi) const;
  double evaluate(std::span<const double> xi, Workspace& workspace) const;

  /// Realizations 0..count-1 of the stream `seed`; independent of `threads`.
  std::vector<double> sample(std::size_t count, std::uint64_t seed, int threads = 0) const;

  /// q = 1 only: exact variance sum_j F(j)^2 of the discretized integral.
  double exact_variance() const;

  /// q <= 2: exact E[value^2] = q! ||symmetrized off-diagonal F||^2, from the
  /// node-factor matrices (dense; grids up to a few thousand cells).
  double exact_second_moment() const;

  /// Coefficients F(j) for q = 1 (length noise_dimension).
  Eigen::VectorXd linear_coefficients() const;

  /// Full tensor F (row-major, first index slowest) computed cell by cell
  /// without the FFT/Chebyshev machinery. Only for tiny grids.
  std::vector<double> materialize_tensor() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Values of several samplers driven by the same noise, plus W(horizon) in the
/// last column. All samplers must share the grid geometry.
Eigen::MatrixXd sample_joint(std::span<const ChaosSampler* const> samplers, std::size_t count,
                             std::uint64_t seed, int threads = 0);

enum class Normalization {
  Continuum,  // A_gamma as is: E Z(1)^2 = 1 in the continuum limit
  Exact,      // q = 1: rescale by the exact discrete variance
  Pilot,      // rescale by the second moment of an independent pilot batch
};

struct SamplerOptions {
  Normalization normalization = Normalization::Continuum;
  std::size_t pilot_size = 20000;
  int threads = 0;
};

struct ChaosSampleBatch {
  std::vector<double> values;
  std::uint64_t seed = 0;
  GridSpec grid;
  KernelSpec kernel;
  Normalization normalization = Normalization::Continuum;
  double scale = 1.0;
  double from = 0.0;
  double to = 0.0;
};

ChaosSampleBatch sample_chaos(const KernelSpec& kernel, const GridSpec& grid, int q,
                              std::size_t count, std::uint64_t seed,
                              const SamplerOptions& options = {});

/// Z(t) - Z(s) from the same noise stream as sample_chaos(kernel, grid, ...).
ChaosSampleBatch sample_process_increment(const KernelSpec& kernel, const GridSpec& grid, int q,
                                          double s, double t, std::size_t count,
                                          std::uint64_t seed, const SamplerOptions& options = {});

}  // namespace rosenblatt
