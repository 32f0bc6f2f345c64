#include "rosenblatt/limit_suite.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rosenblatt/error.hpp"
#include "rosenblatt/kernel.hpp"
#include "rosenblatt/parallel.hpp"
#include "rosenblatt/special_functions.hpp"

namespace rosenblatt {

int ExperimentPlan::order() const {
  return path.face == Face::FirstExponentToHalf ? path.base.order() + 1 : path.base.order();
}

GridSpec ExperimentPlan::grid_for(int q) const {
  GridSpec g = grid ? *grid : default_grid(q, horizon);
  g.horizon = horizon;
  return g;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "PASS";
    case Verdict::Fail:
      return "FAIL";
    case Verdict::NotApplicable:
      return "NOT-APPLICABLE";
  }
  return "?";
}

namespace {

constexpr std::size_t kMinKsSamples = 1000;

Estimate raw_cos(std::span<const double> values) {
  std::vector<double> mapped(values.size());
  std::transform(values.begin(), values.end(), mapped.begin(), [](double x) { return std::cos(x); });
  return raw_moment(mapped, 1);
}

Estimate raw_sin(std::span<const double> values) {
  std::vector<double> mapped(values.size());
  std::transform(values.begin(), values.end(), mapped.begin(), [](double x) { return std::sin(x); });
  return raw_moment(mapped, 1);
}

void check_plan(const ExperimentPlan& plan, Face face) {
  if (plan.path.face != face) {
    throw Error(ErrorKind::InvalidInput, face == Face::FirstExponentToHalf
                                             ? "NCLT experiment needs a first-face path"
                                             : "CLT experiment needs a second-face path");
  }
  if (plan.samples < kMinKsSamples) {
    throw Error(ErrorKind::InvalidInput, "KS verdicts need at least 1000 samples per point");
  }
  if (plan.path.epsilons.empty()) throw Error(ErrorKind::InvalidInput, "empty path");
  if (!(plan.horizon > 0.0)) throw Error(ErrorKind::InvalidInput, "horizon must be positive");
}

SamplerOptions sampler_options(const ExperimentPlan& plan) {
  SamplerOptions o;
  o.normalization = plan.normalization;
  o.pilot_size = plan.pilot_size;
  o.threads = plan.threads;
  return o;
}

struct CharacteristicValue {
  double re = 0.0;
  double im = 0.0;
  double variance = 0.0;  // of the mean, real and imaginary parts combined
};

CharacteristicValue characteristic(std::span<const double> values) {
  const auto re = raw_cos(values);
  const auto im = raw_sin(values);
  return {re.value, im.value, re.se * re.se + im.se * im.se};
}

// E exp(iX) for X ~ N(0, 1)
const CharacteristicValue kNormalCharacteristic{std::exp(-0.5), 0.0, 0.0};

ExperimentRow make_row(double epsilon, const GammaVector& gamma, const ChaosSampleBatch& batch,
                       const Estimate& ks, const CharacteristicValue& reference) {
  ExperimentRow row;
  row.epsilon = epsilon;
  row.gamma.assign(gamma.entries().begin(), gamma.entries().end());
  row.ks = ks;
  row.moment2 = raw_moment(batch.values, 2);
  row.moment3 = raw_moment(batch.values, 3);
  row.moment4 = raw_moment(batch.values, 4);
  const CharacteristicValue c = characteristic(batch.values);
  row.smooth_distance = {std::hypot(c.re - reference.re, c.im - reference.im),
                         std::sqrt(c.variance + reference.variance)};
  row.scale = batch.scale;
  row.exact_moment3 = gamma.order() == 2 ? second_chaos_third_moment(gamma)
                                         : std::numeric_limits<double>::quiet_NaN();
  return row;
}

// E[(scale Z)^2 W^2] with Z and W from one joint draw
Estimate joint_moment(const KernelSpec& kernel, const GridSpec& grid, double scale,
                      std::size_t count, std::uint64_t seed, int threads,
                      const std::vector<double>* eta) {
  ChaosSampler sampler(kernel, grid);
  const ChaosSampler* list[] = {&sampler};
  const Eigen::MatrixXd joint = sample_joint(list, count, seed, threads);
  std::vector<double> values(count);
  for (std::size_t m = 0; m < count; ++m) {
    double z = scale * joint(static_cast<Eigen::Index>(m), 0);
    if (eta) z *= (*eta)[m];
    const double w = joint(static_cast<Eigen::Index>(m), 1);
    values[m] = z * z * w * w;
  }
  return raw_moment(values, 1);
}

std::vector<double> eta_draws(std::size_t count, std::uint64_t seed) {
  std::vector<double> eta(count);
  for (std::size_t m = 0; m < count; ++m) eta[m] = RealizationStream(seed, m).normal();
  return eta;
}

}  // namespace

double second_chaos_third_moment(const GammaVector& gamma) {
  if (gamma.order() != 2) throw Error(ErrorKind::Size, "third moment closed form needs q = 2");
  const double a2 = normalizing_constant_sq(gamma);
  // E I_2(f~)^3 = 8 <f~ (x)_1 f~, f~> over the triangle x-y-z with edges carrying s1, s2, s3
  constexpr int kEdges[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  double total = 0.0;
  for (int orientation = 0; orientation < 8; ++orientation) {
    // per vertex: (edge, exponent) for its two incident edges
    std::pair<int, double> incident[3][2];
    int filled[3] = {0, 0, 0};
    for (int k = 0; k < 3; ++k) {
      const bool flip = (orientation >> k) & 1;
      const int u = kEdges[k][0];
      const int v = kEdges[k][1];
      incident[u][filled[u]++] = {k, flip ? gamma[1] : gamma[0]};
      incident[v][filled[v]++] = {k, flip ? gamma[0] : gamma[1]};
    }
    std::array<int, 3> order{0, 1, 2};
    do {
      int position[3];
      for (int i = 0; i < 3; ++i) position[order[static_cast<std::size_t>(i)]] = i;
      double coefficient = 1.0;
      double exponent[3][3] = {};
      for (const auto& vertex : incident) {
        auto first = vertex[0];
        auto second = vertex[1];
        if (position[first.first] > position[second.first]) std::swap(first, second);
        coefficient *= beta(first.second + 1.0, -first.second - second.second - 1.0);
        exponent[position[first.first]][position[second.first]] = first.second + second.second + 1.0;
      }
      const double p = exponent[0][1];
      const double q = exponent[1][2];
      const double r = exponent[0][2];
      const double big = p + q + r;
      // int_{t1<t2<t3 in [0,1]} (t2-t1)^p (t3-t2)^q (t3-t1)^r
      total += coefficient * beta(p + 1.0, q + 1.0) / ((big + 2.0) * (big + 3.0));
    } while (std::next_permutation(order.begin(), order.end()));
  }
  return a2 * std::sqrt(a2) * total;
}

ChaosSampleBatch sample_limit_mixture(const GammaVector& gamma_tail, double t, std::size_t count,
                                      std::uint64_t seed, const std::optional<GridSpec>& grid,
                                      SamplerOptions options) {
  const int order = gamma_tail.order();
  if (order < 1) throw Error(ErrorKind::InvalidInput, "mixture needs a nonempty tail vector");
  KernelSpec kernel(gamma_tail, t);
  GridSpec g = grid ? *grid : default_grid(order, t);
  g.horizon = t;
  if (order == 1) options.normalization = Normalization::Exact;
  ChaosSampleBatch batch = sample_chaos(kernel, g, order, count, derive_seed(seed, "chaos"), options);
  const auto eta = eta_draws(count, derive_seed(seed, "eta"));
  for (std::size_t m = 0; m < count; ++m) batch.values[m] *= eta[m];
  batch.seed = seed;
  return batch;
}

ExperimentReport run_nclt_experiment(const ExperimentPlan& plan) {
  check_plan(plan, Face::FirstExponentToHalf);
  ExperimentReport report;
  report.kind = "nclt";
  report.plan = plan;
  report.q = plan.order();
  const int q = report.q;
  if (q < 2) throw Error(ErrorKind::InvalidInput, "NCLT experiment needs q >= 2");
  const auto points = path_points(plan.path);
  const SamplerOptions options = sampler_options(plan);

  std::optional<GridSpec> tail_grid;
  if (plan.grid) tail_grid = plan.grid_for(q - 1);
  const auto mixture = sample_limit_mixture(plan.path.base, plan.horizon, plan.samples,
                                            derive_seed(plan.seed, "mixture"), tail_grid, options);
  report.reference_moment2 = raw_moment(mixture.values, 2);
  report.reference_moment4 = raw_moment(mixture.values, 4);
  const CharacteristicValue reference = characteristic(mixture.values);

  const GridSpec grid = plan.grid_for(q);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const KernelSpec kernel(points[k], plan.horizon);
    const auto batch = sample_chaos(kernel, grid, q, plan.samples, derive_seed(plan.seed, k), options);
    const Estimate ks = ks_two_sample(batch.values, mixture.values, 200, derive_seed(plan.seed, k));
    report.rows.push_back(make_row(plan.path.epsilons[k], points[k], batch, ks, reference));
  }

  bool decreasing = true;
  for (std::size_t k = 1; k < report.rows.size(); ++k) {
    decreasing = decreasing && report.rows[k].ks.value < report.rows[k - 1].ks.value;
  }
  const ExperimentRow& last = report.rows.back();
  const bool small = last.ks.value <= plan.ks_threshold;
  if (!decreasing) report.notes.push_back("KS not strictly decreasing along the path");
  if (!small) report.notes.push_back("final KS above the threshold");
  bool control_ok = true;
  if (plan.control) {
    if (plan.control->order() != q) throw Error(ErrorKind::InvalidInput, "control order differs from q");
    const KernelSpec kernel(*plan.control, plan.horizon);
    const auto batch =
        sample_chaos(kernel, grid, q, plan.samples, derive_seed(plan.seed, "control"), options);
    ControlResult control;
    control.gamma.assign(plan.control->entries().begin(), plan.control->entries().end());
    control.ks = ks_two_sample(batch.values, mixture.values, 200, derive_seed(plan.seed, "control"));
    control.moment4 = raw_moment(batch.values, 4);
    control_ok = control.ks.value - last.ks.value > 3.0 * std::hypot(control.ks.se, last.ks.se);
    control.verdict = control_ok ? Verdict::Pass : Verdict::Fail;
    if (!control_ok) report.notes.push_back("control KS not clearly above the final KS");
    report.control = control;
  }
  report.verdict = decreasing && small && control_ok ? Verdict::Pass : Verdict::Fail;

  if (plan.stability_diagnostic) {
    const KernelSpec kernel(points.back(), plan.horizon);
    StabilityDiagnostic diag;
    const std::uint64_t seed = derive_seed(plan.seed, "stability");
    diag.process = joint_moment(kernel, grid, last.scale, plan.samples, seed, plan.threads, nullptr);
    const auto eta = eta_draws(plan.samples, derive_seed(seed, "eta"));
    const GridSpec g = tail_grid ? *tail_grid : default_grid(q - 1, plan.horizon);
    diag.limit = joint_moment(KernelSpec(plan.path.base, plan.horizon), g, mixture.scale,
                              plan.samples, derive_seed(seed, "limit"), plan.threads, &eta);
    report.stability = diag;
  }
  return report;
}

ExperimentReport run_clt_experiment(const ExperimentPlan& plan) {
  check_plan(plan, Face::SumToCriticalValue);
  ExperimentReport report;
  report.kind = "clt";
  report.plan = plan;
  report.q = plan.order();
  const int q = report.q;
  const auto points = path_points(plan.path);
  const SamplerOptions options = sampler_options(plan);
  report.reference_moment2 = {1.0, 0.0};
  report.reference_moment4 = {3.0, 0.0};
  const GridSpec grid = plan.grid_for(q);

  for (std::size_t k = 0; k < points.size(); ++k) {
    const KernelSpec kernel(points[k], plan.horizon);
    const auto batch = sample_chaos(kernel, grid, q, plan.samples, derive_seed(plan.seed, k), options);
    const Estimate ks = ks_one_sample(batch.values, standard_normal_cdf, 200, derive_seed(plan.seed, k));
    report.rows.push_back(make_row(plan.path.epsilons[k], points[k], batch, ks, kNormalCharacteristic));
  }
  const ExperimentRow& first = report.rows.front();
  const ExperimentRow& last = report.rows.back();
  const double excess_first = std::abs(first.moment4.value - 3.0);
  const double excess_last = std::abs(last.moment4.value - 3.0);
  const bool small = last.ks.value <= plan.ks_threshold;
  const bool fourth = excess_last <= 3.0 * last.moment4.se;
  const bool shrink = report.rows.size() < 2 || (last.ks.value < first.ks.value && excess_last < excess_first);
  if (!small) report.notes.push_back("final KS above the threshold");
  if (!fourth) report.notes.push_back("final fourth moment differs from 3 by more than 3 SE");
  if (!shrink) report.notes.push_back("KS or |E Z^4 - 3| did not shrink along the path");
  report.verdict = small && fourth && shrink ? Verdict::Pass : Verdict::Fail;

  if (plan.control) {
    if (plan.control->order() != q) throw Error(ErrorKind::InvalidInput, "control order differs from q");
    const KernelSpec kernel(*plan.control, plan.horizon);
    const auto batch =
        sample_chaos(kernel, grid, q, plan.samples, derive_seed(plan.seed, "control"), options);
    ControlResult control;
    control.gamma.assign(plan.control->entries().begin(), plan.control->entries().end());
    control.ks = ks_one_sample(batch.values, standard_normal_cdf, 200, derive_seed(plan.seed, "control"));
    control.moment4 = raw_moment(batch.values, 4);
    control.verdict = Verdict::NotApplicable;
    std::ostringstream msg;
    msg << "control far from the face: KS " << control.ks.value << " (limit theorem not applicable)";
    report.notes.push_back(msg.str());
    report.control = control;
  }
  return report;
}

RateReport rate_probe(const ExperimentReport& nclt, double level) {
  if (nclt.kind != "nclt") throw Error(ErrorKind::InvalidInput, "rate probe needs an NCLT report");
  if (nclt.rows.size() < 4) throw Error(ErrorKind::InvalidInput, "rate probe needs at least 4 path points");
  RateReport out;
  for (const auto& row : nclt.rows) {
    if (!(row.smooth_distance.value > 0.0)) {
      throw Error(ErrorKind::FitFailure, "smooth distance is zero at some path point");
    }
    out.log_distance_scale.push_back(std::log(-1.0 - 2.0 * row.gamma.front()));
    out.log_distance.push_back(std::log(row.smooth_distance.value));
  }
  out.fit = fit_line(out.log_distance_scale, out.log_distance, level);
  out.consistent = out.fit.ci_low <= 0.5 && 0.5 <= out.fit.ci_high;
  return out;
}

KsCalibration calibrate_ks_threshold(const KernelSpec& kernel, const GridSpec& grid, int q,
                                     std::size_t samples, std::size_t replicates, std::uint64_t seed,
                                     double level, const SamplerOptions& options) {
  if (replicates < 2) throw Error(ErrorKind::InvalidInput, "calibration needs at least 2 replicates");
  KsCalibration out;
  for (std::size_t r = 0; r < replicates; ++r) {
    const auto a = sample_chaos(kernel, grid, q, samples, derive_seed(seed, 2 * r), options);
    const auto b = sample_chaos(kernel, grid, q, samples, derive_seed(seed, 2 * r + 1), options);
    out.distances.push_back(ks_two_sample(a.values, b.values, 0).value);
  }
  std::vector<double> sorted = out.distances;
  std::sort(sorted.begin(), sorted.end());
  const auto idx = static_cast<std::size_t>(std::ceil(level * static_cast<double>(sorted.size()))) - 1;
  out.quantile = sorted[std::min(idx, sorted.size() - 1)];
  for (double d : sorted) out.mean += d;
  out.mean /= static_cast<double>(sorted.size());
  out.asymptotic = ks_null_quantile(samples, samples, level);
  return out;
}

}  // namespace rosenblatt
