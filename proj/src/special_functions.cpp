#include "rosenblatt/special_functions.hpp"

#include <algorithm>

namespace rosenblatt {

BetaProbe beta_small_alpha_probe(double b0, double b1, const std::vector<double>& alphas,
                                 double threshold, int grid_points) {
  if (alphas.empty()) throw Error(ErrorKind::InvalidInput, "empty alpha list");
  if (!(b0 > 0.0) || !(b1 > b0)) throw Error(ErrorKind::InvalidInput, "need 0 < b0 < b1");
  if (grid_points < 2) throw Error(ErrorKind::InvalidInput, "need at least two beta grid points");
  BetaProbe probe;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    const double alpha = alphas[k];
    if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidInput, "alphas must be positive");
    if (k > 0 && !(alpha < alphas[k - 1])) {
      throw Error(ErrorKind::InvalidInput, "alphas must be decreasing");
    }
    double sup = 0.0;
    for (int i = 0; i < grid_points; ++i) {
      const double b = b0 + (b1 - b0) * i / (grid_points - 1);
      sup = std::max(sup, std::abs(alpha * beta(alpha, b) - 1.0));
    }
    probe.rows.push_back({alpha, sup});
  }
  for (std::size_t k = 1; k < probe.rows.size(); ++k) {
    if (probe.rows[k - 1].alpha < b0 && probe.rows[k].sup_deviation > probe.rows[k - 1].sup_deviation) {
      probe.monotone_below_b0 = false;
    }
  }
  probe.final_below_threshold = probe.rows.back().sup_deviation < threshold;
  return probe;
}

}  // namespace rosenblatt
