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

#ifndef SPEED_ISA_H_
#define SPEED_ISA_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace speed {

// Operand precision. Each precision fuses a fixed number of operands along the
// input-channel dimension into one unified element.
enum class Precision : std::uint8_t { kP4, kP8, kP16 };

constexpr int OperandBits(Precision p) {
  switch (p) {
    case Precision::kP4: return 4;
    case Precision::kP8: return 8;
    case Precision::kP16: return 16;
  }
  return 0;
}

// Operands per unified element: 16, 4 and 1 for 4, 8 and 16 bits.
constexpr int IcPar(Precision p) {
  switch (p) {
    case Precision::kP4: return 16;
    case Precision::kP8: return 4;
    case Precision::kP16: return 1;
  }
  return 0;
}

constexpr int ElementBits(Precision p) { return IcPar(p) * OperandBits(p); }

constexpr int OperandMin(Precision p) { return -(1 << (OperandBits(p) - 1)); }
constexpr int OperandMax(Precision p) { return (1 << (OperandBits(p) - 1)) - 1; }

inline constexpr Precision kAllPrecisions[] = {Precision::kP4, Precision::kP8,
                                               Precision::kP16};

// Parses "4", "8", "16", "e4", "e8", "e16".
Precision ParsePrecision(std::string_view text);
std::string_view PrecisionName(Precision p);  // "e4", "e8", "e16"

enum class Dataflow : std::uint8_t { kFF, kCF };

Dataflow ParseDataflow(std::string_view text);  // "ff" / "cf"
std::string_view DataflowName(Dataflow d);      // "ff" / "cf"

struct VsaCfg {
  Precision precision = Precision::kP16;
  Dataflow dataflow = Dataflow::kFF;
  friend bool operator==(const VsaCfg&, const VsaCfg&) = default;
};

// Broadcast load: the same elements land in register `vd` of every lane.
struct VsaLd {
  std::uint8_t vd = 0;
  std::uint8_t base = 0;
  std::uint16_t count = 0;
  friend bool operator==(const VsaLd&, const VsaLd&) = default;
};

struct VsaM {
  std::uint8_t vs1 = 0;
  std::uint8_t vs2 = 0;
  std::uint8_t acc = 0;
  std::uint16_t steps = 1;
  friend bool operator==(const VsaM&, const VsaM&) = default;
};

// Operand-requester geometry for subsequent VSAMs.
struct VSetCfg {
  std::uint16_t row_pitch = 0;
  std::uint8_t run = 0;
  friend bool operator==(const VSetCfg&, const VSetCfg&) = default;
};

// Ordered-allocation load.
struct Vle {
  std::uint8_t vd = 0;
  std::uint8_t base = 0;
  std::uint16_t count = 0;
  friend bool operator==(const Vle&, const Vle&) = default;
};

// Ordered store of 32-bit accumulator words.
struct Vse {
  std::uint8_t vs = 0;
  std::uint8_t base = 0;
  std::uint16_t count = 0;
  friend bool operator==(const Vse&, const Vse&) = default;
};

using Instruction = std::variant<VsaCfg, VsaLd, VsaM, VSetCfg, Vle, Vse>;

// Field limits of the encoding.
inline constexpr int kNumRegs = 32;
inline constexpr int kMaxCount = (1 << 12) - 1;
inline constexpr int kMaxSteps = (1 << 8) - 1;
inline constexpr int kMaxRowPitch = (1 << 9) - 1;
inline constexpr int kMaxRun = (1 << 8) - 1;
inline constexpr std::uint32_t kCustom0Opcode = 0b0001011;

// Throws Error(kFieldOverflow) if a field does not fit its bit range.
std::uint32_t Encode(const Instruction& instr);

// Strict decoder. Throws Error(kIllegalInstruction) or Error(kReservedField).
Instruction Decode(std::uint32_t word);

std::string Disassemble(const Instruction& instr);

// One word per non-blank, non-comment line. Throws Error(kParseError) with the
// 1-based line number.
std::vector<std::uint32_t> Assemble(std::string_view source);

std::string_view Mnemonic(const Instruction& instr);

}  // namespace speed

#endif  // SPEED_ISA_H_
