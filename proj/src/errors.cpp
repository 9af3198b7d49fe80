#include "otz/errors.hpp"

#include <sstream>

namespace otz {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::DomainError: return "domain_error";
    case ErrorCode::PatternMismatch: return "pattern_mismatch";
    case ErrorCode::Validation: return "validation_failed";
    case ErrorCode::KernelUnderflow: return "kernel_underflow";
    case ErrorCode::UnbalancedInput: return "unbalanced_input";
    case ErrorCode::TooLarge: return "too_large";
    case ErrorCode::PatternSamplingFailed: return "pattern_sampling_failed";
    case ErrorCode::UnsupportedPattern: return "unsupported_pattern";
    case ErrorCode::ParseError: return "parse_error";
    case ErrorCode::IoError: return "io_error";
  }
  return "unknown";
}

const char* violation_kind_name(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::ZeroRowInPattern: return "zero_row_in_pattern";
    case ViolationKind::ZeroColumnInPattern: return "zero_column_in_pattern";
    case ViolationKind::NonpositiveMarginal: return "nonpositive_marginal";
    case ViolationKind::DimensionMismatch: return "dimension_mismatch";
    case ViolationKind::NonpositiveIdealEntry: return "nonpositive_ideal_entry";
  }
  return "unknown";
}

namespace {
std::string summarize(const std::vector<Violation>& violations) {
  std::ostringstream os;
  os << "instance validation failed (" << violations.size() << " violation"
     << (violations.size() == 1 ? "" : "s") << ")";
  for (const auto& v : violations) {
    os << "; " << violation_kind_name(v.kind);
    if (v.index >= 0) os << "[" << v.index << "]";
    if (!v.detail.empty()) os << ": " << v.detail;
  }
  return os.str();
}
}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(ErrorCode::Validation, summarize(violations)),
      violations_(std::move(violations)) {}

}  // namespace otz
