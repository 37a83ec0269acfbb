#include "panodolly/error.hpp"

namespace panodolly {

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::PoseOutsideSurface: return "PoseOutsideSurface";
    case ErrorCode::DegenerateBasis: return "DegenerateBasis";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::RefitBehindCamera: return "RefitBehindCamera";
    case ErrorCode::CornerBehindCamera: return "CornerBehindCamera";
    case ErrorCode::PointBehindCamera: return "PointBehindCamera";
    case ErrorCode::InfeasibleInterval: return "InfeasibleInterval";
    case ErrorCode::EmptyInput: return "EmptyInput";
    }
    return "Unknown";
}

}  // namespace panodolly
