#pragma once

#include <stdexcept>
#include <string>

namespace gesteach {

// Numeric values are part of the C API (gesteach.h mirrors them).
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  ParseError = 2,
  ClockError = 3,
  NoZeroCrossing = 4,
  InsufficientSamples = 5,
  UnknownClass = 6,
  EmptyClass = 7,
  WrongWindowLength = 8,
  DivergenceDetected = 9,
  NotATranslation = 10,
  NotARotation = 11,
  Degenerate = 12,
  MotorsOff = 13,
  NotStopped = 14,
  UnknownVerb = 15,
  EmptyProgram = 16,
  GuardStopped = 17,
  BindFailure = 18,
  IoError = 19,
  Internal = 99,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gesteach
