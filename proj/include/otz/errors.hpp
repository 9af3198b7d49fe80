#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace otz {

enum class ErrorCode {
  InvalidArgument,
  DomainError,
  PatternMismatch,
  Validation,
  KernelUnderflow,
  UnbalancedInput,
  TooLarge,
  PatternSamplingFailed,
  UnsupportedPattern,
  ParseError,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

enum class ViolationKind {
  ZeroRowInPattern,
  ZeroColumnInPattern,
  NonpositiveMarginal,
  DimensionMismatch,
  NonpositiveIdealEntry,
};

const char* violation_kind_name(ViolationKind kind);

// One defect found while validating a problem instance. `index` is the
// offending row, column, or entry index; -1 when not applicable.
struct Violation {
  ViolationKind kind;
  long index = -1;
  std::string detail;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

}  // namespace otz
