#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rosenblatt/contraction.hpp"
#include "rosenblatt/error.hpp"
#include "rosenblatt/io.hpp"
#include "rosenblatt/kernel.hpp"
#include "rosenblatt/limit_suite.hpp"

using namespace rosenblatt;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

// JSON numbers are written by the library's shortest round-trip formatter,
// which is deterministic for a given value.
void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

std::vector<double> parse_list(const std::string& text) {
  const GammaVector parsed = parse_gamma(text);
  return {parsed.entries().begin(), parsed.entries().end()};
}

std::vector<int> parse_indices(const std::string& text) {
  std::vector<int> out;
  if (text.empty()) return out;
  for (double v : parse_list(text)) {
    if (v != std::floor(v) || v < 1) throw Error(ErrorKind::InvalidInput, "indices are positive integers");
    out.push_back(static_cast<int>(v) - 1);
  }
  return out;
}

struct GridFlags {
  int cells = 0;
  int buffer = 0;
  double tail_ratio = 0.0;
  double log_left = std::numeric_limits<double>::quiet_NaN();
  double tail_tolerance = 0.0;

  void add(CLI::App* app) {
    app->add_option("--cells", cells, "uniform cells per horizon");
    app->add_option("--buffer", buffer, "uniform cells left of 0");
    app->add_option("--tail-ratio", tail_ratio, "geometric ratio of the tail cells");
    app->add_option("--log-left", log_left, "ln L of the left truncation");
    app->add_option("--tail-tolerance", tail_tolerance, "neglected tail mass fraction");
  }

  GridSpec apply(GridSpec g) const {
    if (cells > 0) {
      g.cells_per_horizon = cells;
      if (buffer <= 0) g.buffer_cells = std::max(1, cells / 8);
    }
    if (buffer > 0) g.buffer_cells = buffer;
    if (tail_ratio > 0.0) g.tail_ratio = tail_ratio;
    if (!std::isnan(log_left)) g.log_left_truncation = log_left;
    if (tail_tolerance > 0.0) g.tail_tolerance = tail_tolerance;
    return g;
  }

  bool any() const { return cells > 0 || buffer > 0 || tail_ratio > 0.0 || !std::isnan(log_left) || tail_tolerance > 0.0; }
};

struct PlanFlags {
  std::string plan_file;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double threshold = 0.0;
  std::string normalization;
  std::string out_json;
  std::string out_csv;
  GridFlags grid;

  void add(CLI::App* app) {
    app->add_option("--plan", plan_file, "JSON experiment plan");
    app->add_option("--samples", samples, "samples per path point");
    app->add_option_function<std::uint64_t>("--seed", [this](std::uint64_t s) { seed = s; seed_set = true; }, "master seed");
    app->add_option("--threshold", threshold, "KS threshold");
    app->add_option("--normalization", normalization, "continuum, exact or pilot");
    app->add_option("--out-json", out_json, "report JSON path");
    app->add_option("--out-csv", out_csv, "long-format CSV path");
    grid.add(app);
  }

  ExperimentPlan resolve(ExperimentPlan plan, int threads) const {
    if (!plan_file.empty()) {
      std::ifstream in(plan_file);
      if (!in) throw Error(ErrorKind::InvalidInput, "cannot read plan file " + plan_file);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("plan file is not JSON: ") + e.what());
      }
      plan = plan_from_json(j, plan);
    }
    if (samples > 0) plan.samples = samples;
    if (seed_set) plan.seed = seed;
    if (threshold > 0.0) plan.ks_threshold = threshold;
    if (!normalization.empty()) plan.normalization = parse_normalization(normalization);
    if (grid.any()) plan.grid = grid.apply(plan.grid ? *plan.grid : default_grid(plan.order(), plan.horizon));
    plan.threads = threads;
    return plan;
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path);
  out << text;
}

json with_manifest(const std::string& command, const json& config, json body) {
  RunManifest manifest{command, config};
  body["manifest"] = manifest.to_json();
  body["manifest_hash"] = manifest.hash();
  return body;
}

int finish_report(const std::string& command, const ExperimentReport& report, const PlanFlags& flags) {
  const json config = to_json(report.plan);
  const RunManifest manifest{command, config};
  json body = with_manifest(command, config, to_json(report));
  if (!flags.out_json.empty()) write_text(flags.out_json, body.dump(2) + "\n");
  if (!flags.out_csv.empty()) {
    std::ostringstream csv;
    csv << "# manifest " << manifest.hash() << '\n';
    write_report_csv(csv, report);
    write_text(flags.out_csv, csv.str());
  }
  emit(body);
  return report.verdict == Verdict::Pass ? kOk : kFailure;
}

ExperimentPlan nclt_defaults() {
  ExperimentPlan plan;
  plan.path = {Face::FirstExponentToHalf, GammaVector{-0.7}, {0.05, 0.01, 0.002}, 0.0, SplitRule::Proportional};
  plan.control = GammaVector{-0.75, -0.7};
  return plan;
}

ExperimentPlan clt_defaults() {
  ExperimentPlan plan;
  plan.path = {Face::SumToCriticalValue, GammaVector{-0.7, -0.7}, {0.1, 0.02, 0.005}, 0.0, SplitRule::Proportional};
  plan.control = GammaVector{-0.6, -0.6};
  return plan;
}

ExperimentPlan rate_defaults() {
  ExperimentPlan plan;
  plan.path = {Face::FirstExponentToHalf, GammaVector{-0.7}, {0.04, 0.01, 0.0025, 0.000625}, 0.0,
               SplitRule::Proportional};
  return plan;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Rosenblatt process: constants, sampling, contraction checks and limit experiments"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: ROSENBLATT_THREADS or all cores)");

  std::string gamma_text;
  auto* validate_cmd = app.add_subcommand("validate", "check gamma against the admissible region");
  validate_cmd->add_option("--gamma", gamma_text, "comma-separated exponents")->required();

  auto* constant_cmd = app.add_subcommand("constant", "normalizing constant A_gamma");
  constant_cmd->add_option("--gamma", gamma_text, "comma-separated exponents")->required();

  std::size_t samples = 0;
  std::uint64_t seed = 1;
  double horizon = 1.0;
  double from = 0.0;
  std::string out_path;
  std::string format = "csv";
  std::string normalization = "continuum";
  GridFlags grid_flags;
  auto* sample_cmd = app.add_subcommand("sample", "sample Z_gamma(t) or an increment");
  sample_cmd->add_option("--gamma", gamma_text, "comma-separated exponents")->required();
  sample_cmd->add_option("--samples", samples, "number of realizations")->required();
  sample_cmd->add_option("--seed", seed, "seed");
  sample_cmd->add_option("--horizon", horizon, "t");
  sample_cmd->add_option("--from", from, "s for the increment Z(t) - Z(s)");
  sample_cmd->add_option("--out", out_path, "output file")->required();
  sample_cmd->add_option("--format", format, "csv or binary")->check(CLI::IsMember({"csv", "binary"}));
  sample_cmd->add_option("--normalization", normalization, "continuum, exact or pilot");
  grid_flags.add(sample_cmd);

  std::string kind = "ii";
  std::string face = "first";
  std::string base_text;
  std::string eps_text;
  std::string i_text;
  std::string psi_text;
  int r = -1;
  double tolerance = 1e-6;
  std::string csv_path;
  auto* conditions_cmd = app.add_subcommand("conditions", "contraction trends along a boundary path");
  conditions_cmd->add_option("--kind", kind, "ii, iii or clt")->check(CLI::IsMember({"ii", "iii", "clt"}));
  conditions_cmd->add_option("--face", face, "first or second (clt)")->check(CLI::IsMember({"first", "second"}));
  conditions_cmd->add_option("--base", base_text, "path base vector")->required();
  conditions_cmd->add_option("--epsilons", eps_text, "strictly decreasing distances")->required();
  conditions_cmd->add_option("--I", i_text, "contracted coordinates of the left factor (1-based)");
  conditions_cmd->add_option("--psi", psi_text, "matched coordinates of the right factor (1-based)");
  conditions_cmd->add_option("--r", r, "enumerate every admissible spec of this size");
  conditions_cmd->add_option("--tolerance", tolerance, "quadrature tolerance");
  conditions_cmd->add_option("--out", csv_path, "CSV path (default stdout)");

  PlanFlags nclt_flags;
  auto* nclt_cmd = app.add_subcommand("verify-nclt", "noncentral limit experiment on the first face");
  nclt_flags.add(nclt_cmd);
  PlanFlags clt_flags;
  auto* clt_cmd = app.add_subcommand("verify-clt", "central limit experiment on the second face");
  clt_flags.add(clt_cmd);
  PlanFlags rate_flags;
  auto* rate_cmd = app.add_subcommand("rate", "log-log rate fit of the smooth distance on the first face");
  rate_flags.add(rate_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*validate_cmd) {
      const GammaVector gamma = parse_gamma(gamma_text);
      const DomainReport report = validate(gamma);
      json body = to_json(report);
      body["gamma"] = to_json(gamma);
      emit(body);
      return report.inside ? kOk : kFailure;
    }
    if (*constant_cmd) {
      const GammaVector gamma = parse_gamma(gamma_text);
      const double a2 = normalizing_constant_sq(gamma);
      emit(json{{"gamma", to_json(gamma)}, {"A", std::sqrt(a2)}, {"A2", a2}});
      return kOk;
    }
    if (*sample_cmd) {
      const GammaVector gamma = parse_gamma(gamma_text);
      const int q = gamma.order();
      const KernelSpec kernel(gamma, horizon);
      GridSpec grid = grid_flags.apply(default_grid(q, horizon));
      grid.horizon = horizon;
      SamplerOptions options;
      options.normalization = parse_normalization(normalization);
      options.threads = threads;
      const json config{{"gamma", to_json(gamma)}, {"samples", samples}, {"seed", seed},
                        {"horizon", horizon}, {"from", from}, {"grid", to_json(grid)},
                        {"normalization", normalization}, {"format", format}};
      const RunManifest manifest{"sample", config};
      const auto batch = sample_process_increment(kernel, grid, q, from, horizon, samples, seed, options);
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + out_path);
      if (format == "csv") {
        write_batch_csv(out, batch, manifest.hash());
      } else {
        write_batch_binary(out, batch, manifest.hash());
      }
      emit(json{{"manifest", manifest.to_json()}, {"manifest_hash", manifest.hash()}, {"out", out_path},
                {"count", batch.values.size()}, {"scale", batch.scale}, {"grid", to_json(batch.grid)}});
      return kOk;
    }
    if (*conditions_cmd) {
      BoundaryPath path{face == "first" ? Face::FirstExponentToHalf : Face::SumToCriticalValue,
                        GammaVector(parse_list(base_text)), parse_list(eps_text), 0.0, SplitRule::Proportional};
      ContractionOptions options;
      options.tolerance = tolerance;
      const int q = kind == "iii" ? path.base.order() : path.base.order() + (face == "first" ? 1 : 0);
      std::vector<ContractionSpec> specs;
      if (r >= 0) {
        for (auto& spec : enumerate_contractions(q, q, r)) {
          if (kind == "ii") {
            const auto it = std::find(spec.I.begin(), spec.I.end(), 0);
            if (it == spec.I.end() || spec.psi[static_cast<std::size_t>(it - spec.I.begin())] == 0) continue;
          }
          if (kind == "clt" && (r < 1 || r > q - 1)) continue;
          specs.push_back(spec);
        }
      } else {
        specs.push_back({q, q, parse_indices(i_text), parse_indices(psi_text)});
      }
      std::ostringstream csv;
      const json config{{"kind", kind}, {"path", to_json(path)}, {"tolerance", tolerance}, {"r", r},
                        {"I", i_text}, {"psi", psi_text}};
      const RunManifest manifest{"conditions", config};
      csv << "# manifest " << manifest.hash() << '\n';
      csv << (kind == "clt" ? "I,psi,epsilon,norm_sq,exponent_sum\n" : "I,psi,epsilon,value,target,gap\n");
      auto label = [](const std::vector<int>& v) {
        std::string s;
        for (int k : v) s += (s.empty() ? "" : " ") + std::to_string(k + 1);
        return s;
      };
      for (const auto& spec : specs) {
        std::vector<TrendRow> rows;
        if (kind == "ii") {
          if (path.face != Face::FirstExponentToHalf) throw Error(ErrorKind::InvalidInput, "condition (ii) needs --face first");
          rows = ncl_condition_ii_trend(path, spec, options);
        } else if (kind == "iii") {
          if (path.face != Face::FirstExponentToHalf) throw Error(ErrorKind::InvalidInput, "condition (iii) needs --face first");
          rows = ncl_condition_iii_limit(path, spec, options).rows;
        } else {
          for (const auto& gamma : path_points(path)) {
            const auto bound = clt_norm_bound(gamma, spec, options);
            const double eps = path.face == Face::FirstExponentToHalf ? -0.5 - gamma[0]
                                                                       : gamma.sum() + (gamma.order() + 1) / 2.0;
            csv << label(spec.I) << ',' << label(spec.psi) << ',' << format_double(eps) << ','
                << format_double(bound.norm_sq) << ',' << format_double(bound.exponent_sum) << '\n';
          }
        }
        for (const auto& row : rows) {
          csv << label(spec.I) << ',' << label(spec.psi) << ',' << format_double(row.epsilon) << ','
              << format_double(row.value) << ',' << format_double(row.target) << ',' << format_double(row.gap) << '\n';
        }
      }
      if (csv_path.empty()) {
        std::cout << csv.str();
      } else {
        write_text(csv_path, csv.str());
      }
      return kOk;
    }
    if (*nclt_cmd) return finish_report("verify-nclt", run_nclt_experiment(nclt_flags.resolve(nclt_defaults(), threads)), nclt_flags);
    if (*clt_cmd) return finish_report("verify-clt", run_clt_experiment(clt_flags.resolve(clt_defaults(), threads)), clt_flags);
    if (*rate_cmd) {
      const ExperimentPlan plan = rate_flags.resolve(rate_defaults(), threads);
      const auto report = run_nclt_experiment(plan);
      const auto rate = rate_probe(report);
      const json config = to_json(plan);
      json body = with_manifest("rate", config, json{{"experiment", to_json(report)}, {"rate", to_json(rate)}});
      if (!rate_flags.out_json.empty()) write_text(rate_flags.out_json, body.dump(2) + "\n");
      if (!rate_flags.out_csv.empty()) {
        std::ostringstream csv;
        csv << "# manifest " << RunManifest{"rate", config}.hash() << '\n';
        write_report_csv(csv, report);
        write_text(rate_flags.out_csv, csv.str());
      }
      emit(body);
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::InvalidInput ? kUsage : kFailure;
  }
  return kUsage;
}
