#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mocomp {

/// Machine-readable error codes. The string names returned by code_name()
/// are part of the HTTP API and must never change.
enum class ErrorCode {
    SchemaError,
    ParseError,
    UnsupportedJointType,
    CycleError,
    DanglingLinkError,
    UnitError,
    MonotonicityError,
    VersionError,
    DimensionMismatch,
    JointCountMismatch,
    JointNameMismatch,
    TooFewSamples,
    TooShort,
    InvalidRate,
    InvalidWindow,
    InvalidK,
    InvalidArgument,
    SpanMismatch,
    IndexOutOfRange,
    OutOfRange,
    DegeneratePath,
    EmptyMotion,
    UnknownMotion,
    UnknownSession,
    UnknownLink,
    UnknownTrack,
    UnknownRoute,
    MethodNotAllowed,
    StaleMotionRefs,
    PayloadTooLarge,
    Internal,
};

std::string_view code_name(ErrorCode code);
int http_status(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string detail = {})
        : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

    ErrorCode code() const noexcept { return code_; }
    /// Path to the offending field, line number, or other locator. May be empty.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace mocomp
