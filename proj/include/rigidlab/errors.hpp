#pragma once

#include <stdexcept>
#include <string>

namespace rigidlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateProjection : Error { using Error::Error; };
struct OutsideInjectivityRadius : Error { using Error::Error; };
struct FrameMismatch : Error { using Error::Error; };
struct ResolutionTooSmall : Error { using Error::Error; };
struct FaceImageTooSpread : Error { using Error::Error; };
struct MeshMismatch : Error { using Error::Error; };
struct LipschitzBoundViolated : Error { using Error::Error; };
struct DegenerateStar : Error { using Error::Error; };
struct DegenerateFit : Error { using Error::Error; };
struct SolverFailure : Error { using Error::Error; };
struct StepRejected : Error { using Error::Error; };
struct InvalidArgument : Error { using Error::Error; };

}  // namespace rigidlab
