#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace factorgroup {

enum class ErrorCode {
  DimensionMismatch,
  NonFiniteEntry,
  EmptyAssignment,
  InvalidArgument,
  RankDeficient,
  EigenFailure,
  DegenerateGroup,
  ZeroResidual,
  SingularLoadings,
  InsufficientRows,
  IndivisibleGroups,
  LengthMismatch,
  ParseError,
  NoRowsRemaining,
  ZeroVariance,
  EmptyMonth,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-readable code so
// callers (CLI exit codes, Monte-Carlo failure counters, tests) can branch on
// the kind of failure without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace factorgroup
