#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace quboc {

enum class ErrorCode {
  InvalidLabel,
  UnsupportedOperation,
  LabelConflict,
  DuplicateConstraint,
  MissingPlaceholder,
  MissingVariable,
  InvalidArgument,
  LimitExceeded,
  ParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidLabel: return "invalid label";
    case ErrorCode::UnsupportedOperation: return "unsupported operation";
    case ErrorCode::LabelConflict: return "label conflict";
    case ErrorCode::DuplicateConstraint: return "duplicate constraint";
    case ErrorCode::MissingPlaceholder: return "missing placeholder";
    case ErrorCode::MissingVariable: return "missing variable";
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::LimitExceeded: return "limit exceeded";
    case ErrorCode::ParseError: return "parse error";
  }
  return "unknown error";
}

/// Every failure raised by the library is an Error carrying a code, so callers
/// can branch on the category without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

inline std::string join_labels(const std::vector<std::string>& labels) {
  std::string out;
  for (const auto& l : labels) {
    if (!out.empty()) out += ", ";
    out += '\'';
    out += l;
    out += '\'';
  }
  return out;
}

}  // namespace detail

}  // namespace quboc
