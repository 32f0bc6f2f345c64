#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rosenblatt/contraction.hpp"
#include "rosenblatt/limit_suite.hpp"

namespace rosenblatt {

inline constexpr const char* kVersion = "0.1.0";

/// %.17g
std::string format_double(double x);
/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

nlohmann::json to_json(const GammaVector& gamma);
nlohmann::json to_json(const GridSpec& grid);
nlohmann::json to_json(const BoundaryPath& path);
nlohmann::json to_json(const DomainReport& report);
nlohmann::json to_json(const Estimate& e);
nlohmann::json to_json(const ExperimentReport& report);
nlohmann::json to_json(const RateReport& report);

Normalization parse_normalization(const std::string& name);
nlohmann::json to_json(const ExperimentPlan& plan);
/// Keys as written by to_json; missing keys keep the values of `defaults`.
ExperimentPlan plan_from_json(const nlohmann::json& j, ExperimentPlan defaults);

GridSpec grid_from_json(const nlohmann::json& j, GridSpec base);
/// Keys: face ("first"|"second"), base, epsilons, floor_epsilon, split ("proportional"|"equal").
BoundaryPath path_from_json(const nlohmann::json& j);

struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::string version = kVersion;

  nlohmann::json to_json() const;
  /// Hash of the compact serialization of to_json().
  std::string hash() const;
};

/// Header comment lines then a `value` column.
void write_batch_csv(std::ostream& out, const ChaosSampleBatch& batch, const std::string& manifest_hash);

/// "RSBATCH1", u32 header length, JSON header, u64 count, count doubles in
/// host byte order.
void write_batch_binary(std::ostream& out, const ChaosSampleBatch& batch, const std::string& manifest_hash);

struct BatchFile {
  nlohmann::json header;
  std::vector<double> values;
};
BatchFile read_batch_binary(std::istream& in);

/// Long format: epsilon,statistic,value,se
void write_report_csv(std::ostream& out, const ExperimentReport& report);
/// epsilon,value,target,gap
void write_trend_csv(std::ostream& out, const std::vector<TrendRow>& rows);

}  // namespace rosenblatt
