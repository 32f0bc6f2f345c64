#include "rosenblatt/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>

#include "rosenblatt/error.hpp"

namespace rosenblatt {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json to_json(const GammaVector& gamma) { return json(std::vector<double>(gamma.entries().begin(), gamma.entries().end())); }

json to_json(const GridSpec& g) {
  json j;
  j["horizon"] = g.horizon;
  j["cells_per_horizon"] = g.cells_per_horizon;
  j["buffer_cells"] = g.buffer_cells;
  j["tail_ratio"] = g.tail_ratio;
  j["log_left_truncation"] = std::isnan(g.log_left_truncation) ? json(nullptr) : json(g.log_left_truncation);
  j["tail_tolerance"] = g.tail_tolerance;
  j["nodes_per_cell"] = g.nodes_per_cell;
  j["chebyshev_nodes"] = g.chebyshev_nodes;
  return j;
}

json to_json(const BoundaryPath& p) {
  json j;
  j["face"] = p.face == Face::FirstExponentToHalf ? "first" : "second";
  j["base"] = to_json(p.base);
  j["epsilons"] = p.epsilons;
  j["floor_epsilon"] = p.floor_epsilon;
  j["split"] = p.split == SplitRule::Proportional ? "proportional" : "equal";
  return j;
}

json to_json(const DomainReport& r) {
  json j;
  j["inside"] = r.inside;
  j["violations"] = r.violations;
  j["face1_distance"] = r.face1_distance;
  j["face2_distance"] = r.face2_distance;
  return j;
}

json to_json(const Estimate& e) { return json{{"value", e.value}, {"se", e.se}}; }

json to_json(const ExperimentReport& r) {
  json j;
  j["kind"] = r.kind;
  j["q"] = r.q;
  j["path"] = to_json(r.plan.path);
  j["samples"] = r.plan.samples;
  j["seed"] = r.plan.seed;
  j["horizon"] = r.plan.horizon;
  j["ks_threshold"] = r.plan.ks_threshold;
  j["grid"] = to_json(r.plan.grid_for(r.q));
  j["reference_moment2"] = to_json(r.reference_moment2);
  j["reference_moment4"] = to_json(r.reference_moment4);
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"epsilon", row.epsilon},
                    {"gamma", row.gamma},
                    {"ks", to_json(row.ks)},
                    {"moment2", to_json(row.moment2)},
                    {"moment3", to_json(row.moment3)},
                    {"moment4", to_json(row.moment4)},
                    {"exact_moment3", std::isnan(row.exact_moment3) ? json(nullptr) : json(row.exact_moment3)},
                    {"smooth_distance", to_json(row.smooth_distance)},
                    {"scale", row.scale}});
  }
  j["rows"] = rows;
  if (r.control) {
    j["control"] = {{"gamma", r.control->gamma},
                    {"ks", to_json(r.control->ks)},
                    {"moment4", to_json(r.control->moment4)},
                    {"verdict", to_string(r.control->verdict)}};
  }
  if (r.stability) {
    j["stability"] = {{"process_z2w2", to_json(r.stability->process)},
                      {"limit_z2w2", to_json(r.stability->limit)}};
  }
  j["verdict"] = to_string(r.verdict);
  j["notes"] = r.notes;
  return j;
}

json to_json(const RateReport& r) {
  json j;
  j["log_scale"] = r.log_distance_scale;
  j["log_distance"] = r.log_distance;
  j["slope"] = r.fit.slope;
  j["intercept"] = r.fit.intercept;
  j["r_squared"] = r.fit.r_squared;
  j["slope_se"] = r.fit.slope_se;
  j["ci"] = {r.fit.ci_low, r.fit.ci_high};
  j["verdict"] = r.consistent ? "CONSISTENT" : "INCONSISTENT";
  return j;
}

namespace {

const char* normalization_name(Normalization n) {
  switch (n) {
    case Normalization::Continuum:
      return "continuum";
    case Normalization::Exact:
      return "exact";
    case Normalization::Pilot:
      return "pilot";
  }
  return "?";
}

}  // namespace

Normalization parse_normalization(const std::string& name) {
  if (name == "continuum") return Normalization::Continuum;
  if (name == "exact") return Normalization::Exact;
  if (name == "pilot") return Normalization::Pilot;
  throw Error(ErrorKind::InvalidInput, "normalization must be continuum, exact or pilot");
}

json to_json(const ExperimentPlan& plan) {
  json j;
  j["path"] = to_json(plan.path);
  j["grid"] = plan.grid ? to_json(*plan.grid) : json(nullptr);
  j["samples"] = plan.samples;
  j["seed"] = plan.seed;
  j["horizon"] = plan.horizon;
  j["ks_threshold"] = plan.ks_threshold;
  j["normalization"] = normalization_name(plan.normalization);
  j["pilot_size"] = plan.pilot_size;
  j["control"] = plan.control ? to_json(*plan.control) : json(nullptr);
  j["stability_diagnostic"] = plan.stability_diagnostic;
  return j;
}

ExperimentPlan plan_from_json(const json& j, ExperimentPlan plan) {
  try {
    if (j.contains("path")) plan.path = path_from_json(j["path"]);
    if (j.contains("grid")) {
      if (j["grid"].is_null()) {
        plan.grid.reset();
      } else {
        plan.grid = grid_from_json(j["grid"], plan.grid ? *plan.grid : default_grid(plan.order(), plan.horizon));
      }
    }
    plan.samples = j.value("samples", plan.samples);
    plan.seed = j.value("seed", plan.seed);
    plan.horizon = j.value("horizon", plan.horizon);
    plan.ks_threshold = j.value("ks_threshold", plan.ks_threshold);
    if (j.contains("normalization")) plan.normalization = parse_normalization(j["normalization"].get<std::string>());
    plan.pilot_size = j.value("pilot_size", plan.pilot_size);
    if (j.contains("control")) {
      if (j["control"].is_null()) {
        plan.control.reset();
      } else {
        plan.control = GammaVector(j["control"].get<std::vector<double>>());
      }
    }
    plan.stability_diagnostic = j.value("stability_diagnostic", plan.stability_diagnostic);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed plan: ") + e.what());
  }
  return plan;
}

GridSpec grid_from_json(const json& j, GridSpec g) {
  g.horizon = j.value("horizon", g.horizon);
  g.cells_per_horizon = j.value("cells_per_horizon", g.cells_per_horizon);
  g.buffer_cells = j.value("buffer_cells", g.buffer_cells);
  g.tail_ratio = j.value("tail_ratio", g.tail_ratio);
  if (j.contains("log_left_truncation") && !j["log_left_truncation"].is_null()) {
    g.log_left_truncation = j["log_left_truncation"].get<double>();
  }
  g.tail_tolerance = j.value("tail_tolerance", g.tail_tolerance);
  g.nodes_per_cell = j.value("nodes_per_cell", g.nodes_per_cell);
  g.chebyshev_nodes = j.value("chebyshev_nodes", g.chebyshev_nodes);
  return g;
}

BoundaryPath path_from_json(const json& j) {
  BoundaryPath p{Face::FirstExponentToHalf, GammaVector{}, {}, 0.0, SplitRule::Proportional};
  try {
    const std::string face = j.at("face").get<std::string>();
    if (face == "first") {
      p.face = Face::FirstExponentToHalf;
    } else if (face == "second") {
      p.face = Face::SumToCriticalValue;
    } else {
      throw Error(ErrorKind::InvalidInput, "path face must be 'first' or 'second'");
    }
    p.base = GammaVector(j.at("base").get<std::vector<double>>());
    p.epsilons = j.at("epsilons").get<std::vector<double>>();
    p.floor_epsilon = j.value("floor_epsilon", 0.0);
    const std::string split = j.value("split", std::string("proportional"));
    if (split == "proportional") {
      p.split = SplitRule::Proportional;
    } else if (split == "equal") {
      p.split = SplitRule::Equal;
    } else {
      throw Error(ErrorKind::InvalidInput, "path split must be 'proportional' or 'equal'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed path: ") + e.what());
  }
  return p;
}

json RunManifest::to_json() const {
  return json{{"command", command}, {"config", config}, {"version", version}};
}

std::string RunManifest::hash() const { return fnv1a_hex(to_json().dump()); }

namespace {

json batch_header(const ChaosSampleBatch& batch, const std::string& manifest_hash) {
  json j;
  j["seed"] = batch.seed;
  j["gamma"] = to_json(batch.kernel.gamma());
  j["horizon"] = batch.kernel.horizon();
  j["grid"] = to_json(batch.grid);
  j["grid_hash"] = fnv1a_hex(to_json(batch.grid).dump());
  j["normalization"] = normalization_name(batch.normalization);
  j["scale"] = batch.scale;
  j["from"] = batch.from;
  j["to"] = batch.to;
  j["count"] = batch.values.size();
  j["manifest"] = manifest_hash;
  return j;
}

}  // namespace

void write_batch_csv(std::ostream& out, const ChaosSampleBatch& batch, const std::string& manifest_hash) {
  const json header = batch_header(batch, manifest_hash);
  out << "# rosenblatt batch " << header.dump() << '\n';
  out << "value\n";
  for (double v : batch.values) out << format_double(v) << '\n';
}

void write_batch_binary(std::ostream& out, const ChaosSampleBatch& batch, const std::string& manifest_hash) {
  const std::string header = batch_header(batch, manifest_hash).dump();
  out.write("RSBATCH1", 8);
  const auto length = static_cast<std::uint32_t>(header.size());
  out.write(reinterpret_cast<const char*>(&length), sizeof length);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  const auto count = static_cast<std::uint64_t>(batch.values.size());
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  out.write(reinterpret_cast<const char*>(batch.values.data()),
            static_cast<std::streamsize>(batch.values.size() * sizeof(double)));
}

BatchFile read_batch_binary(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::string_view(magic, 8) != "RSBATCH1") {
    throw Error(ErrorKind::InvalidInput, "not a batch file");
  }
  std::uint32_t length = 0;
  in.read(reinterpret_cast<char*>(&length), sizeof length);
  std::string header(length, '\0');
  in.read(header.data(), length);
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!in) throw Error(ErrorKind::InvalidInput, "truncated batch header");
  BatchFile file;
  file.header = json::parse(header);
  file.values.resize(count);
  in.read(reinterpret_cast<char*>(file.values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw Error(ErrorKind::InvalidInput, "truncated batch data");
  return file;
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
  out << "epsilon,statistic,value,se\n";
  auto line = [&](double eps, const char* name, const Estimate& e) {
    out << format_double(eps) << ',' << name << ',' << format_double(e.value) << ',' << format_double(e.se) << '\n';
  };
  for (const auto& row : report.rows) {
    line(row.epsilon, "ks", row.ks);
    line(row.epsilon, "moment2", row.moment2);
    line(row.epsilon, "moment3", row.moment3);
    line(row.epsilon, "moment4", row.moment4);
    if (!std::isnan(row.exact_moment3)) line(row.epsilon, "exact_moment3", {row.exact_moment3, 0.0});
    line(row.epsilon, "scale", {row.scale, 0.0});
    line(row.epsilon, "smooth_distance", row.smooth_distance);
  }
}

void write_trend_csv(std::ostream& out, const std::vector<TrendRow>& rows) {
  out << "epsilon,value,target,gap\n";
  for (const auto& r : rows) {
    out << format_double(r.epsilon) << ',' << format_double(r.value) << ',' << format_double(r.target)
        << ',' << format_double(r.gap) << '\n';
  }
}

}  // namespace rosenblatt
