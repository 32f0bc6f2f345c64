#include "rosenblatt/grid.hpp"

#include <algorithm>
#include <numbers>

#include "rosenblatt/error.hpp"
#include "rosenblatt/special_functions.hpp"

namespace rosenblatt {

GridSpec default_grid(int q, double horizon) {
  GridSpec spec;
  spec.horizon = horizon;
  spec.cells_per_horizon = q <= 2 ? 4096 : 1024;
  spec.buffer_cells = spec.cells_per_horizon / 8;
  return spec;
}

namespace {

// int int_{[0,1]^2} prod_j |s1-s2|^{2 g_j + 1} B(g_j + 1, -2 g_j - 1) ds1 ds2
double unsymmetrized_mass(const std::vector<double>& gammas) {
  double product = 1.0;
  double e = 0.0;
  for (double g : gammas) {
    product *= beta(g + 1.0, -2.0 * g - 1.0);
    e += 2.0 * g + 1.0;
  }
  return product * 2.0 / ((e + 1.0) * (e + 2.0));
}

}  // namespace

double tail_mass_fraction(const GammaVector& gamma, double horizon, double log_left_truncation) {
  const int q = gamma.order();
  std::vector<double> all(gamma.entries().begin(), gamma.entries().end());
  const double full = unsymmetrized_mass(all);
  const double log_ratio = log_left_truncation - std::log(horizon);
  double total = 0.0;
  for (int i = 0; i < q; ++i) {
    std::vector<double> rest;
    for (int j = 0; j < q; ++j) {
      if (j != i) rest.push_back(gamma[j]);
    }
    const double exponent = 2.0 * gamma[i] + 1.0;  // negative inside the region
    total += std::exp(exponent * log_ratio) / (-exponent) * unsymmetrized_mass(rest);
  }
  return total / full;
}

double required_log_left_truncation(const GammaVector& gamma, double horizon, double tolerance) {
  if (!(tolerance > 0.0)) throw Error(ErrorKind::InvalidInput, "tail tolerance must be positive");
  double lo = std::log(horizon);
  if (tail_mass_fraction(gamma, horizon, lo) <= tolerance) return lo;
  double hi = lo + 1.0;
  while (tail_mass_fraction(gamma, horizon, hi) > tolerance) {
    hi = lo + 2.0 * (hi - lo);
    if (hi > 1e7) throw Error(ErrorKind::GridTooSmall, "tail tolerance unreachable");
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-9 * std::max(1.0, std::abs(hi)); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (tail_mass_fraction(gamma, horizon, mid) > tolerance) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

GridGeometry::GridGeometry(const GridSpec& spec, double log_left_truncation)
    : spec_(spec), mesh_(spec.mesh()), uniform_cells_(spec.buffer_cells + spec.cells_per_horizon),
      log_left_truncation_(log_left_truncation) {
  if (!(spec.horizon > 0.0) || spec.cells_per_horizon < 1 || spec.buffer_cells < 1) {
    throw Error(ErrorKind::InvalidInput, "grid needs a positive horizon, cells and buffer");
  }
  if (!(spec.tail_ratio > 1.0)) throw Error(ErrorKind::InvalidInput, "tail ratio must exceed 1");
  if (spec.nodes_per_cell < 1 || spec.chebyshev_nodes < 2) {
    throw Error(ErrorKind::InvalidInput, "grid quadrature sizes too small");
  }
  const double log_h = std::log(mesh_);
  const double log_r = std::log(spec.tail_ratio);
  const double r = spec.tail_ratio;
  const double b = spec.buffer_cells;
  // magnitude of the k-th tail edge: B h + h r (r^k - 1) / (r - 1), in log form
  auto log_edge = [&](double k) {
    const double decay = std::exp(-k * log_r);
    return log_h + k * log_r + std::log(b * decay + r * (-std::expm1(-k * log_r)) / (r - 1.0));
  };
  constexpr std::size_t kMaxTailCells = 2'000'000;
  for (std::size_t k = 0; log_edge(static_cast<double>(k)) < log_left_truncation; ++k) {
    if (k >= kMaxTailCells) throw Error(ErrorKind::Size, "too many tail cells; raise tail_ratio");
    tail_.push_back({log_edge(static_cast<double>(k + 1)), log_edge(static_cast<double>(k))});
  }
}

double GridGeometry::left_edge(int cell) const {
  if (cell < uniform_cells_) return (cell - spec_.buffer_cells) * mesh_;
  return -std::exp(tail_.at(static_cast<std::size_t>(cell - uniform_cells_)).log_left);
}

double GridGeometry::width(int cell) const {
  if (cell < uniform_cells_) return mesh_;
  const auto& c = tail_.at(static_cast<std::size_t>(cell - uniform_cells_));
  return std::exp(c.log_left) * -std::expm1(c.log_right - c.log_left);
}

double tail_scaled_average(const TailCell& cell, double s, double g) {
  const double e = g + 1.0;
  const double a_left = cell.log_left + std::log1p(s * std::exp(-cell.log_left));
  const double a_right = cell.log_right + std::log1p(s * std::exp(-cell.log_right));
  const double log_width = cell.log_left + std::log1p(-std::exp(cell.log_right - cell.log_left));
  return std::exp(e * a_left - 0.5 * log_width) * (-std::expm1(e * (a_right - a_left))) / e;
}

double GridGeometry::scaled_average(int cell, double s, double g) const {
  if (cell >= uniform_cells_) {
    return tail_scaled_average(tail_.at(static_cast<std::size_t>(cell - uniform_cells_)), s, g);
  }
  const double e = g + 1.0;
  const double x_left = (cell - spec_.buffer_cells) * mesh_;
  const double x_right = x_left + mesh_;
  if (s <= x_left) return 0.0;
  const double upper = std::pow(s - x_left, e);
  const double lower = s > x_right ? std::pow(s - x_right, e) : 0.0;
  return (upper - lower) / (e * std::sqrt(mesh_));
}

GaussRule gauss_legendre_unit(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "Gauss rule needs at least one node");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double off = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = off;
    jacobi(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussRule rule;
  rule.nodes = (solver.eigenvalues().array() + 1.0) / 2.0;
  rule.weights = solver.eigenvectors().row(0).transpose().array().square();
  return rule;
}

Eigen::VectorXd chebyshev_points(int n, double a, double b) {
  Eigen::VectorXd points(n);
  for (int c = 0; c < n; ++c) {
    const double angle = std::numbers::pi * (c + 0.5) / n;
    points(c) = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(angle);
  }
  return points;
}

Eigen::MatrixXd chebyshev_interpolation_matrix(const Eigen::VectorXd& points,
                                               const Eigen::VectorXd& targets) {
  const Eigen::Index n = points.size();
  // barycentric weights for first-kind points
  Eigen::VectorXd weights(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const double angle = std::numbers::pi * (static_cast<double>(c) + 0.5) / static_cast<double>(n);
    weights(c) = ((c % 2 == 0) ? 1.0 : -1.0) * std::sin(angle);
  }
  Eigen::MatrixXd matrix = Eigen::MatrixXd::Zero(targets.size(), n);
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    const double s = targets(i);
    Eigen::Index exact = -1;
    for (Eigen::Index c = 0; c < n; ++c) {
      if (s == points(c)) exact = c;
    }
    if (exact >= 0) {
      matrix(i, exact) = 1.0;
      continue;
    }
    double denominator = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      const double term = weights(c) / (s - points(c));
      matrix(i, c) = term;
      denominator += term;
    }
    matrix.row(i) /= denominator;
  }
  return matrix;
}

}  // namespace rosenblatt
