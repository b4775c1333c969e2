#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace harmtree {

enum class ErrorCode {
  EmptyInput,
  MultipleRoots,
  CycleDetected,
  MixedLeafLevels,
  InvalidVertex,
  NotALeaf,
  LevelUnderflow,
  LevelOverflow,
  DimensionMismatch,
  InvalidMeasure,
  InvalidFunction,
  NoInternalVertices,
  RadiusOutOfRange,
  InvalidExponent,
  RequiresLocallyDoubling,
  RequiresBranching,
  KernelAuditFailed,
  InvalidArgument,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (and the CLI) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace harmtree
