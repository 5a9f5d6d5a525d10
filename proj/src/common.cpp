#include "meshpatch/common.hpp"

namespace meshpatch {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonTriangleFace: return "NonTriangleFace";
    case ErrorCode::NonManifoldInput: return "NonManifoldInput";
    case ErrorCode::DegenerateExtent: return "DegenerateExtent";
    case ErrorCode::InvalidFace: return "InvalidFace";
    case ErrorCode::DegenerateFace: return "DegenerateFace";
    case ErrorCode::TargetUnreachable: return "TargetUnreachable";
    case ErrorCode::FlatteningFoldover: return "FlatteningFoldover";
    case ErrorCode::PointOutsideChart: return "PointOutsideChart";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::InsufficientCandidates: return "InsufficientCandidates";
    case ErrorCode::PatchBudgetExceeded: return "PatchBudgetExceeded";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::EntryNotFound: return "EntryNotFound";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace meshpatch
