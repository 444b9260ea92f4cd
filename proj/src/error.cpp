#include "tileforge/error.hpp"

namespace tileforge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedSpec: return "MalformedSpec";
    case ErrorCode::DuplicateTile: return "DuplicateTile";
    case ErrorCode::ColorOutOfRange: return "ColorOutOfRange";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::WindowSearchExploded: return "WindowSearchExploded";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::LayoutInfeasible: return "LayoutInfeasible";
    case ErrorCode::RejectedByProgram: return "RejectedByProgram";
    case ErrorCode::TimeBudgetExceeded: return "TimeBudgetExceeded";
    case ErrorCode::ZoomMismatch: return "ZoomMismatch";
    case ErrorCode::LetterNotInAlphabet: return "LetterNotInAlphabet";
    case ErrorCode::SizeCap: return "SizeCap";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::SearchCap: return "SearchCap";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DuplicatePoint: return "DuplicatePoint";
    case ErrorCode::TooManyErasures: return "TooManyErasures";
    case ErrorCode::InconsistentData: return "InconsistentData";
    case ErrorCode::ComponentTooLarge: return "ComponentTooLarge";
    case ErrorCode::ExtendedRequiresBiIslands: return "ExtendedRequiresBiIslands";
    case ErrorCode::NoWindows: return "NoWindows";
    case ErrorCode::NoExtension: return "NoExtension";
    case ErrorCode::ContextDamaged: return "ContextDamaged";
    case ErrorCode::ResidualErrors: return "ResidualErrors";
    case ErrorCode::NoDelegatedBit: return "NoDelegatedBit";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace tileforge
