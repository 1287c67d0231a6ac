#include "capgcf/error.hpp"

namespace capgcf {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::AngleOutOfRange: return "AngleOutOfRange";
        case ErrorCode::BadNodeCount: return "BadNodeCount";
        case ErrorCode::NotConvex: return "NotConvex";
        case ErrorCode::RobinViolation: return "RobinViolation";
        case ErrorCode::GeneratorFailed: return "GeneratorFailed";
        case ErrorCode::NonpositiveSupport: return "NonpositiveSupport";
        case ErrorCode::NoInteriorMinimum: return "NoInteriorMinimum";
        case ErrorCode::MaxIterations: return "MaxIterations";
        case ErrorCode::CurvatureBlowup: return "CurvatureBlowup";
        case ErrorCode::ConvexityLost: return "ConvexityLost";
        case ErrorCode::NewtonStalled: return "NewtonStalled";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, std::string module, const std::string& detail)
    : std::runtime_error(module + ": " + std::string(to_string(code)) + ": " + detail),
      code_(code),
      module_(std::move(module)) {}

}  // namespace capgcf
