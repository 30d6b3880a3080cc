#pragma once

#include <stdexcept>
#include <string>

namespace bwf {

enum class ErrorKind {
  NotPositiveDefinite,
  DimensionMismatch,
  NumericalBreakdown,
  SingularCovariance,
  NonConvergence,
  SingularOperator,
  RankDeficientSurrogate,
  OddDimension,
  ParseError,
  AsymmetricResponse,
  MissingCell,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

/// Library-wide exception carrying a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace bwf
