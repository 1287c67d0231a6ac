#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace capgcf {

enum class ErrorCode {
    InvalidArgument,
    AngleOutOfRange,
    BadNodeCount,
    NotConvex,
    RobinViolation,
    GeneratorFailed,
    NonpositiveSupport,
    NoInteriorMinimum,
    MaxIterations,
    CurvatureBlowup,
    ConvexityLost,
    NewtonStalled,
    SchemaMismatch,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries the module that raised it and a
// machine-checkable code; what() reads "<module>: <Code>: <detail>".
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string module, const std::string& detail);

    ErrorCode code() const noexcept { return code_; }
    const std::string& module() const noexcept { return module_; }

private:
    ErrorCode code_;
    std::string module_;
};

}  // namespace capgcf
