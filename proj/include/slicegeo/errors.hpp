#pragma once

#include <stdexcept>
#include <string>

namespace slicegeo {

enum class ErrorKind {
  spacelike_violation,
  domain_violation,
  missing_derivative,
  degenerate_plane,
  rebase_unavailable,
  non_positive_m,
  window_exhausted,
  seed_not_spacelike,
  config_error,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::spacelike_violation: return "SpacelikeViolation";
    case ErrorKind::domain_violation: return "DomainViolation";
    case ErrorKind::missing_derivative: return "MissingDerivative";
    case ErrorKind::degenerate_plane: return "DegeneratePlane";
    case ErrorKind::rebase_unavailable: return "RebaseUnavailable";
    case ErrorKind::non_positive_m: return "NonPositiveM";
    case ErrorKind::window_exhausted: return "WindowExhausted";
    case ErrorKind::seed_not_spacelike: return "SeedNotSpacelike";
    case ErrorKind::config_error: return "ConfigError";
  }
  return "UnknownError";
}

/// Domain-level failure (the slice leaves the chart, a model limit is hit,
/// a requested construction is unavailable). Carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

}  // namespace slicegeo
