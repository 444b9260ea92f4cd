#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tileforge {

enum class ErrorCode {
  MalformedSpec,
  DuplicateTile,
  ColorOutOfRange,
  NoSolution,
  UnknownName,
  WindowSearchExploded,
  CapExceeded,
  LayoutInfeasible,
  RejectedByProgram,
  TimeBudgetExceeded,
  ZoomMismatch,
  LetterNotInAlphabet,
  SizeCap,
  OutOfDomain,
  SearchCap,
  DimensionMismatch,
  DuplicatePoint,
  TooManyErasures,
  InconsistentData,
  ComponentTooLarge,
  ExtendedRequiresBiIslands,
  NoWindows,
  NoExtension,
  ContextDamaged,
  ResidualErrors,
  NoDelegatedBit,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Domain error carrying a machine-readable code. The CLI maps these to exit
/// status 1; everything else (usage, I/O) is status 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tileforge
