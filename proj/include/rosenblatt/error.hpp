#pragma once

#include <stdexcept>
#include <string>

namespace rosenblatt {

enum class ErrorKind {
  InvalidInput,
  Domain,
  Size,
  PathInfeasible,
  DivergentIntegral,
  GridTooSmall,
  FitFailure,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` lets callers (the CLI in
/// particular) map failures to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Size: return "size error";
    case ErrorKind::PathInfeasible: return "path infeasible";
    case ErrorKind::DivergentIntegral: return "divergent integral";
    case ErrorKind::GridTooSmall: return "grid too small";
    case ErrorKind::FitFailure: return "fit failure";
  }
  return "error";
}

}  // namespace rosenblatt
