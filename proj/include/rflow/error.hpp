#pragma once

#include <stdexcept>
#include <string>

namespace rflow {

enum class ErrorKind {
  InvalidCurve,
  IndexOutOfRange,
  QuadratureUnderflow,
  DegenerateCurve,
  BlowupDetected,
  SurgeryFailed,
  InvalidParams,
  OutOfWindow,
  InvalidR,
  AmbiguousTangency,
  InsufficientSnapshots,
  ValidationFailed,
  NumericalInstability,
  SchemaError,
  IoError,
};

const char* to_string(ErrorKind kind);

// Input-class errors map to CLI exit code 2, numerical failures to 3.
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rflow
