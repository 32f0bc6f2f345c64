#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rosenblatt/sampler.hpp"
#include "rosenblatt/statistics.hpp"

namespace rosenblatt {

struct ExperimentPlan {
  BoundaryPath path;
  std::optional<GridSpec> grid;  // default_grid(q, horizon) when empty
  std::size_t samples = 5000;
  std::uint64_t seed = 1;
  double horizon = 1.0;
  double ks_threshold = 0.03;
  Normalization normalization = Normalization::Pilot;
  std::size_t pilot_size = 20000;
  std::optional<GammaVector> control;
  bool stability_diagnostic = false;
  int threads = 0;

  /// Chaos order of the path points.
  int order() const;
  GridSpec grid_for(int q) const;
};

enum class Verdict { Pass, Fail, NotApplicable };
const char* to_string(Verdict v);

struct ExperimentRow {
  double epsilon = 0.0;
  std::vector<double> gamma;
  Estimate ks;
  Estimate moment2;
  Estimate moment3;
  Estimate moment4;
  /// |E exp(iZ) - E exp(iX)| against the reference law X
  Estimate smooth_distance;
  double scale = 1.0;
  /// Continuum E Z^3 for q = 2, NaN otherwise.
  double exact_moment3 = 0.0;
};

struct ControlResult {
  std::vector<double> gamma;
  Estimate ks;
  Estimate moment4;
  Verdict verdict = Verdict::NotApplicable;
};

/// E[Z^2 W(t)^2] for the process at the last path point and for the limit
/// model, each with its standard error. Informational only.
struct StabilityDiagnostic {
  Estimate process;
  Estimate limit;
};

struct ExperimentReport {
  std::string kind;  // "nclt" or "clt"
  ExperimentPlan plan;
  int q = 0;
  std::vector<ExperimentRow> rows;
  Estimate reference_moment2;
  Estimate reference_moment4;
  std::optional<ControlResult> control;
  std::optional<StabilityDiagnostic> stability;
  Verdict verdict = Verdict::Fail;
  std::vector<std::string> notes;
};

/// E Z_gamma(1)^3 of the continuum second-chaos variable (q = 2), in closed
/// form: a sum over edge orientations and orderings of (s1, s2, s3) of Beta
/// products.
double second_chaos_third_moment(const GammaVector& gamma);

/// eta * Z_{gamma_tail}(t) with eta an independent standard normal. The chaos
/// factor uses Exact normalization for order 1 and `options` otherwise.
ChaosSampleBatch sample_limit_mixture(const GammaVector& gamma_tail, double t, std::size_t count,
                                      std::uint64_t seed, const std::optional<GridSpec>& grid = {},
                                      SamplerOptions options = {});

/// Two-sample KS of Z_gamma(t) against the limit mixture along a first-face
/// path. PASS needs strictly decreasing KS, final KS <= threshold and, when a
/// control is given, a control KS larger than the final one by 3 SE.
ExperimentReport run_nclt_experiment(const ExperimentPlan& plan);

/// One-sample KS against N(0,1) and E Z^4 - 3 along a second-face path. PASS
/// needs the final KS <= threshold, |E Z^4 - 3| within 3 SE, and both
/// statistics smaller at the last point than at the first.
ExperimentReport run_clt_experiment(const ExperimentPlan& plan);

struct RateReport {
  std::vector<double> log_distance_scale;  // log(-1 - 2 gamma_1)
  /// log of the smooth distance
  std::vector<double> log_distance;
  LinearFit fit;
  bool consistent = false;  // 0.5 inside the slope interval
};

/// Log-log fit of the smooth distance against -1 - 2 gamma_1. Needs >= 4 rows.
RateReport rate_probe(const ExperimentReport& nclt, double level = 0.95);

struct KsCalibration {
  double quantile = 0.0;     // empirical `level` quantile over same-law pairs
  double mean = 0.0;
  double asymptotic = 0.0;   // ks_null_quantile(M, M, level)
  std::vector<double> distances;
};

/// Two-sample KS between independent batches of the same law, `replicates`
/// times.
KsCalibration calibrate_ks_threshold(const KernelSpec& kernel, const GridSpec& grid, int q,
                                     std::size_t samples, std::size_t replicates, std::uint64_t seed,
                                     double level = 0.95, const SamplerOptions& options = {});

}  // namespace rosenblatt
