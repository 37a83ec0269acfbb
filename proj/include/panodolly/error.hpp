#pragma once

#include <stdexcept>
#include <string>

namespace panodolly {

enum class ErrorCode {
    PoseOutsideSurface,
    DegenerateBasis,
    InvalidArgument,
    ZeroVector,
    IoError,
    DecodeError,
    RefitBehindCamera,
    CornerBehindCamera,
    PointBehindCamera,
    InfeasibleInterval,
    EmptyInput,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace panodolly
