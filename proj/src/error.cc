// Copyright 2026 The speedsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "speed/error.h"

namespace speed {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFieldOverflow: return "FieldOverflow";
    case ErrorCode::kIllegalInstruction: return "IllegalInstruction";
    case ErrorCode::kReservedField: return "ReservedField";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kOverflow: return "Overflow";
    case ErrorCode::kUnconfiguredPrecision: return "UnconfiguredPrecision";
    case ErrorCode::kPrecisionMismatch: return "PrecisionMismatch";
    case ErrorCode::kStreamUnderrun: return "StreamUnderrun";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kUnknownModel: return "UnknownModel";
    case ErrorCode::kVerificationFailed: return "VerificationFailed";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code),
      message_(message) {}

Error Error::AtLine(int line, const std::string& message) {
  Error e(ErrorCode::kParseError,
          "line " + std::to_string(line) + ": " + message);
  e.line_ = line;
  return e;
}

Error Error::WithPc(std::uint64_t pc) const {
  Error e(code_, "pc " + std::to_string(pc) + ": " + message_);
  e.line_ = line_;
  e.pc_ = pc;
  return e;
}

}  // namespace speed
