#include "rosenblatt/gamma_domain.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rosenblatt/error.hpp"

namespace rosenblatt {

GammaVector::GammaVector(std::vector<double> entries) : entries_(std::move(entries)) {
  for (double g : entries_) {
    if (!std::isfinite(g)) throw Error(ErrorKind::InvalidInput, "non-finite exponent");
  }
  sum_ = std::accumulate(entries_.begin(), entries_.end(), 0.0);
}

GammaVector::GammaVector(std::initializer_list<double> entries)
    : GammaVector(std::vector<double>(entries)) {}

GammaVector GammaVector::tail() const {
  if (entries_.empty()) throw Error(ErrorKind::Size, "tail of an empty exponent vector");
  return GammaVector(std::vector<double>(entries_.begin() + 1, entries_.end()));
}

DomainReport validate(const GammaVector& gamma) {
  DomainReport report;
  const int q = gamma.order();
  if (q < 1) {
    report.violations.push_back("empty exponent vector");
    return report;
  }
  for (int i = 0; i < q; ++i) {
    const double g = gamma[i];
    std::ostringstream label;
    label << "gamma[" << i + 1 << "]";
    if (!(g > -1.0)) report.violations.push_back(label.str() + " <= -1");
    if (!(g < -0.5)) report.violations.push_back(label.str() + " >= -1/2");
  }
  const double critical = -(q + 1) / 2.0;
  if (!(gamma.sum() > critical)) report.violations.push_back("gamma_bar <= -(q+1)/2");
  report.face1_distance = -0.5 - gamma[0];
  report.face2_distance = gamma.sum() - critical;
  report.inside = report.violations.empty();
  return report;
}

bool inside_region(const GammaVector& gamma) { return validate(gamma).inside; }

GammaVector parse_gamma(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string token = text.substr(start, end - start);
    // trim
    const auto first = token.find_first_not_of(" \t");
    const auto last = token.find_last_not_of(" \t");
    if (first == std::string::npos) throw Error(ErrorKind::InvalidInput, "empty entry in '" + text + "'");
    token = token.substr(first, last - first + 1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw Error(ErrorKind::InvalidInput, "malformed number '" + token + "'");
    }
    values.push_back(value);
    start = end + 1;
  }
  return GammaVector(std::move(values));
}

GammaVector path_point(const BoundaryPath& path, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorKind::InvalidInput, "path epsilons must be positive");
  }
  std::vector<double> entries;
  if (path.face == Face::FirstExponentToHalf) {
    entries.push_back(-0.5 - epsilon);
    for (double g : path.base.entries()) entries.push_back(g);
  } else {
    const int q = path.base.order();
    if (q < 1) throw Error(ErrorKind::InvalidInput, "empty base vector");
    const double target = -(q + 1) / 2.0 + epsilon;
    const double current = path.base.sum();
    for (double g : path.base.entries()) {
      if (path.split == SplitRule::Proportional) {
        entries.push_back(g * target / current);
      } else {
        entries.push_back(g + (target - current) / q);
      }
    }
    for (double g : entries) {
      if (!(g > -1.0 + path.floor_epsilon)) {
        std::ostringstream msg;
        msg << "epsilon " << epsilon << " puts a coordinate at " << g
            << ", below the floor -1 + " << path.floor_epsilon;
        throw Error(ErrorKind::PathInfeasible, msg.str());
      }
    }
  }
  GammaVector gamma(std::move(entries));
  const DomainReport report = validate(gamma);
  if (!report.inside) {
    std::ostringstream msg;
    msg << "epsilon " << epsilon << " leaves the region (" << report.violations.front() << ")";
    throw Error(ErrorKind::PathInfeasible, msg.str());
  }
  return gamma;
}

std::vector<GammaVector> path_points(const BoundaryPath& path) {
  std::vector<GammaVector> out;
  for (std::size_t k = 0; k < path.epsilons.size(); ++k) {
    if (k > 0 && !(path.epsilons[k] < path.epsilons[k - 1])) {
      throw Error(ErrorKind::InvalidInput, "path epsilons must be strictly decreasing");
    }
    out.push_back(path_point(path, path.epsilons[k]));
  }
  return out;
}

}  // namespace rosenblatt
