#include "evp/errors.hpp"

namespace evp {

std::string_view error_tag(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::RationalAtPrecision: return "rational-at-precision";
        case ErrorCode::InsufficientDepth: return "insufficient-depth";
        case ErrorCode::StageInfeasible: return "stage-infeasible";
        case ErrorCode::NonPositiveFunction: return "non-positive-function";
        case ErrorCode::MeanObstruction: return "mean-obstruction";
        case ErrorCode::Resonance: return "resonance";
        case ErrorCode::NotDamped: return "not-damped";
        case ErrorCode::DegenerateEnvironment: return "degenerate-environment";
        case ErrorCode::ConstructionFailed: return "construction-failed";
        case ErrorCode::CenteringViolation: return "centering-violation";
        case ErrorCode::ResidualTooLarge: return "residual-too-large";
        case ErrorCode::CapExceeded: return "cap-exceeded";
        case ErrorCode::SegmentIncomplete: return "segment-incomplete";
        case ErrorCode::OrderTooHigh: return "order-too-high";
        case ErrorCode::OutsideMargin: return "outside-margin";
        case ErrorCode::PreconditionFailed: return "precondition-failed";
        case ErrorCode::NuResolution: return "nu-resolution";
        case ErrorCode::SchemaViolation: return "schema-violation";
    }
    return "unknown";
}

}  // namespace evp
