#include "mocomp/errors.hpp"

namespace mocomp {

std::string_view code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::UnsupportedJointType: return "UnsupportedJointType";
        case ErrorCode::CycleError: return "CycleError";
        case ErrorCode::DanglingLinkError: return "DanglingLinkError";
        case ErrorCode::UnitError: return "UnitError";
        case ErrorCode::MonotonicityError: return "MonotonicityError";
        case ErrorCode::VersionError: return "VersionError";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::JointCountMismatch: return "JointCountMismatch";
        case ErrorCode::JointNameMismatch: return "JointNameMismatch";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::InvalidRate: return "InvalidRate";
        case ErrorCode::InvalidWindow: return "InvalidWindow";
        case ErrorCode::InvalidK: return "InvalidK";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::SpanMismatch: return "SpanMismatch";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::DegeneratePath: return "DegeneratePath";
        case ErrorCode::EmptyMotion: return "EmptyMotion";
        case ErrorCode::UnknownMotion: return "UnknownMotion";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::UnknownLink: return "UnknownLink";
        case ErrorCode::UnknownTrack: return "UnknownTrack";
        case ErrorCode::UnknownRoute: return "UnknownRoute";
        case ErrorCode::MethodNotAllowed: return "MethodNotAllowed";
        case ErrorCode::StaleMotionRefs: return "StaleMotionRefs";
        case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
        case ErrorCode::Internal: return "Internal";
    }
    return "Internal";
}

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownMotion:
        case ErrorCode::UnknownSession:
        case ErrorCode::UnknownLink:
        case ErrorCode::UnknownTrack:
        case ErrorCode::UnknownRoute:
            return 404;
        case ErrorCode::MethodNotAllowed:
            return 405;
        case ErrorCode::StaleMotionRefs:
            return 409;
        case ErrorCode::PayloadTooLarge:
            return 413;
        case ErrorCode::Internal:
            return 500;
        default:
            return 400;
    }
}

}  // namespace mocomp
