#pragma once

#include <span>
#include <string>
#include <vector>

namespace rosenblatt {

/// Exponent tuple (gamma_1, ..., gamma_q). Construction only requires finite
/// entries; membership in the admissible region is a separate predicate so
/// that boundary-adjacent vectors can still be represented.
class GammaVector {
 public:
  GammaVector() = default;
  explicit GammaVector(std::vector<double> entries);
  GammaVector(std::initializer_list<double> entries);

  int order() const noexcept { return static_cast<int>(entries_.size()); }
  double sum() const noexcept { return sum_; }
  double operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  std::span<const double> entries() const noexcept { return entries_; }

  /// The vector with the first coordinate removed (gamma_2, ..., gamma_q).
  GammaVector tail() const;

  bool operator==(const GammaVector&) const = default;

 private:
  std::vector<double> entries_;
  double sum_ = 0.0;
};

struct DomainReport {
  bool inside = false;
  std::vector<std::string> violations;
  double face1_distance = 0.0;  // -1/2 - gamma_1
  double face2_distance = 0.0;  // gamma_bar + (q+1)/2
};

DomainReport validate(const GammaVector& gamma);
bool inside_region(const GammaVector& gamma);

/// Parses "-0.6,-0.7" style lists. Throws InvalidInput on malformed numbers.
GammaVector parse_gamma(const std::string& text);

enum class Face { FirstExponentToHalf, SumToCriticalValue };

/// How the sum adjustment is spread over coordinates on the second face.
enum class SplitRule { Proportional, Equal };

struct BoundaryPath {
  Face face = Face::FirstExponentToHalf;
  /// FirstExponentToHalf: the fixed coordinates (gamma_2..gamma_q).
  /// SumToCriticalValue: the full base vector that gets shifted.
  GammaVector base;
  std::vector<double> epsilons;
  double floor_epsilon = 0.0;
  SplitRule split = SplitRule::Proportional;
};

GammaVector path_point(const BoundaryPath& path, double epsilon);
std::vector<GammaVector> path_points(const BoundaryPath& path);

}  // namespace rosenblatt
