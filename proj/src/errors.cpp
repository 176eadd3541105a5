#include "wavecontrol/errors.hpp"

namespace wavecontrol {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::RepeatedEigenvalues: return "RepeatedEigenvalues";
        case ErrorKind::CollisionInBlock: return "CollisionInBlock";
        case ErrorKind::ModeOutOfRange: return "ModeOutOfRange";
        case ErrorKind::BetaZero: return "BetaZero";
        case ErrorKind::ConditioningExceeded: return "ConditioningExceeded";
        case ErrorKind::DegenerateEigenvector: return "DegenerateEigenvector";
        case ErrorKind::GridTooCoarse: return "GridTooCoarse";
        case ErrorKind::BadInput: return "BadInput";
    }
    return "Unknown";
}

}  // namespace wavecontrol
