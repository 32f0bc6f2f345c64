#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "rosenblatt/gamma_domain.hpp"

namespace rosenblatt {

/// Discretization of the noise window (-L, t].
///
/// [0, t] and a short buffer to its left are covered by uniform cells of width
/// h = t / cells_per_horizon. Beyond the buffer the cell widths grow
/// geometrically out to the left truncation L. L is carried as ln L because
/// kernels close to the first face need L far beyond double range.
struct GridSpec {
  double horizon = 1.0;
  int cells_per_horizon = 4096;
  int buffer_cells = 512;
  double tail_ratio = 1.25;
  /// ln L; NaN selects the smallest L meeting tail_tolerance.
  double log_left_truncation = std::numeric_limits<double>::quiet_NaN();
  double tail_tolerance = 1e-3;
  /// Gauss-Legendre nodes per uniform cell for the s-integral.
  int nodes_per_cell = 3;
  /// Chebyshev nodes used to represent the geometric-tail contribution on [0, t].
  int chebyshev_nodes = 48;

  double mesh() const { return horizon / cells_per_horizon; }
};

/// Default grid: 4096 cells per horizon for q <= 2 and 1024 for q = 3.
GridSpec default_grid(int q, double horizon = 1.0);

/// Upper-bound estimate of the fraction of ||f||^2 carried by x_i < -L for
/// some i (union bound over coordinates, relative to the unsymmetrized norm).
double tail_mass_fraction(const GammaVector& gamma, double horizon, double log_left_truncation);

/// Smallest ln L with tail_mass_fraction <= tolerance.
double required_log_left_truncation(const GammaVector& gamma, double horizon, double tolerance);

/// One geometric tail cell [-exp(log_left), -exp(log_right)].
struct TailCell {
  double log_left;
  double log_right;
};

/// Materialized cell layout. Cell indices: uniform cells first (left to right,
/// cell j = [(j - B) h, (j - B + 1) h]), then tail cells from the buffer
/// outward.
class GridGeometry {
 public:
  GridGeometry(const GridSpec& spec, double log_left_truncation);

  const GridSpec& spec() const noexcept { return spec_; }
  double mesh() const noexcept { return mesh_; }
  int uniform_cells() const noexcept { return uniform_cells_; }
  int buffer_cells() const noexcept { return spec_.buffer_cells; }
  int tail_cells() const noexcept { return static_cast<int>(tail_.size()); }
  int total_cells() const noexcept { return uniform_cells_ + tail_cells(); }
  double log_left_truncation() const noexcept { return log_left_truncation_; }
  const std::vector<TailCell>& tail() const noexcept { return tail_; }

  /// Left edge and width of any cell (overflows to inf for far tail cells).
  double left_edge(int cell) const;
  double width(int cell) const;

  /// sqrt(width) times the cell average of (s - x)_+^g over the cell. Finite
  /// for every s >= 0 and every cell, including the far tail.
  double scaled_average(int cell, double s, double g) const;

 private:
  GridSpec spec_;
  double mesh_;
  int uniform_cells_;
  double log_left_truncation_;
  std::vector<TailCell> tail_;
};

/// sqrt(w) times the average of (s - x)_+^g over [-exp(log_left), -exp(log_right)].
double tail_scaled_average(const TailCell& cell, double s, double g);

/// Gauss-Legendre nodes and weights on [0, 1] (Golub-Welsch).
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
GaussRule gauss_legendre_unit(int n);

/// Chebyshev points of the first kind on [a, b] and the barycentric
/// interpolation matrix evaluating the interpolant at `targets`.
Eigen::VectorXd chebyshev_points(int n, double a, double b);
Eigen::MatrixXd chebyshev_interpolation_matrix(const Eigen::VectorXd& points,
                                               const Eigen::VectorXd& targets);

}  // namespace rosenblatt
