#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace meshpatch {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Barycentric triple (alpha, beta, gamma) with respect to a face's corner order.
using Bary = Eigen::Vector3d;

using Face = std::array<int, 3>;

enum class ErrorCode {
  ParseError,
  NonTriangleFace,
  NonManifoldInput,
  DegenerateExtent,
  InvalidFace,
  DegenerateFace,
  TargetUnreachable,
  FlatteningFoldover,
  PointOutsideChart,
  ZeroDenominator,
  InsufficientCandidates,
  PatchBudgetExceeded,
  ShapeMismatch,
  MissingLabel,
  TooFewSamples,
  EntryNotFound,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace meshpatch
