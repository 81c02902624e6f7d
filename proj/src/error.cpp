#include "error.hpp"

namespace gesteach {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ClockError: return "ClockError";
    case ErrorCode::NoZeroCrossing: return "NoZeroCrossing";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::WrongWindowLength: return "WrongWindowLength";
    case ErrorCode::DivergenceDetected: return "DivergenceDetected";
    case ErrorCode::NotATranslation: return "NotATranslation";
    case ErrorCode::NotARotation: return "NotARotation";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::MotorsOff: return "MotorsOff";
    case ErrorCode::NotStopped: return "NotStopped";
    case ErrorCode::UnknownVerb: return "UnknownVerb";
    case ErrorCode::EmptyProgram: return "EmptyProgram";
    case ErrorCode::GuardStopped: return "GuardStopped";
    case ErrorCode::BindFailure: return "BindFailure";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace gesteach
