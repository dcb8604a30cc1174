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

#ifndef SPEED_ERROR_H_
#define SPEED_ERROR_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace speed {

enum class ErrorCode {
  kFieldOverflow,
  kIllegalInstruction,
  kReservedField,
  kParseError,
  kOutOfBounds,
  kOverflow,
  kUnconfiguredPrecision,
  kPrecisionMismatch,
  kStreamUnderrun,
  kInfeasible,
  kShapeMismatch,
  kUnknownModel,
  kVerificationFailed,
  kConfigError,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All simulator failures are reported through this exception. `line` is set
// by the assembler, `pc` by Machine::Run.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }
  // what() without the leading code name.
  const std::string& message() const { return message_; }

  std::optional<int> line() const { return line_; }
  std::optional<std::uint64_t> pc() const { return pc_; }

  static Error AtLine(int line, const std::string& message);
  Error WithPc(std::uint64_t pc) const;

 private:
  ErrorCode code_;
  std::string message_;
  std::optional<int> line_;
  std::optional<std::uint64_t> pc_;
};

}  // namespace speed

#endif  // SPEED_ERROR_H_
