#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evp {

/// Machine-readable failure categories. The CLI prints the tag verbatim.
enum class ErrorCode {
    InvalidArgument,
    RationalAtPrecision,
    InsufficientDepth,
    StageInfeasible,
    NonPositiveFunction,
    MeanObstruction,
    Resonance,
    NotDamped,
    DegenerateEnvironment,
    ConstructionFailed,
    CenteringViolation,
    ResidualTooLarge,
    CapExceeded,
    SegmentIncomplete,
    OrderTooHigh,
    OutsideMargin,
    PreconditionFailed,
    NuResolution,
    SchemaViolation,
};

std::string_view error_tag(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_tag(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace evp
