#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pvgrid {

enum class ErrorKind {
  InvalidInput,       // precondition violated by a caller-supplied value
  NonConvergence,     // iterative solver exhausted its budget
  InfeasibleSpec,     // datasheet admits no physical single-diode fit
  DarkArray,          // no maximum power point exists (g = 0)
  DegenerateInput,    // boost design with v_in >= v_out
  UndefinedPF,        // power factor of (0, 0)
  GridMismatch,       // compared series have different time grids
  CalibrationFailure, // scenario run could not calibrate its PV model
  InvalidScenario,    // scenario violates a structural invariant
  ParseError,         // malformed text input
  ValidationError,    // well-formed input with an invalid value or key
  EmptySeries,        // report requested for a series with no records
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorKind::DarkArray: return "DarkArray";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::UndefinedPF: return "UndefinedPF";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::CalibrationFailure: return "CalibrationFailure";
    case ErrorKind::InvalidScenario: return "InvalidScenario";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::EmptySeries: return "EmptySeries";
  }
  return "Unknown";
}

/// Numerical failures map to CLI exit code 2, everything else to 1.
constexpr bool is_numerical(ErrorKind kind) noexcept {
  return kind == ErrorKind::NonConvergence || kind == ErrorKind::CalibrationFailure ||
         kind == ErrorKind::InfeasibleSpec;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        message_(message) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  [[nodiscard]] const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace pvgrid
