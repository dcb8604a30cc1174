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

#include "speed/isa.h"

#include <cctype>
#include <charconv>
#include <string>

#include "speed/error.h"

namespace speed {
namespace {

enum Funct3 : std::uint32_t {
  kFunctVsaCfg = 0b000,
  kFunctVsaLd = 0b001,
  kFunctVsaM = 0b010,
  kFunctVSetCfg = 0b011,
  kFunctVle = 0b100,
  kFunctVse = 0b101,
  kFunctVsaMHi = 0b110,
};

constexpr std::uint32_t Bits(std::uint32_t word, int hi, int lo) {
  return (word >> lo) & ((1u << (hi - lo + 1)) - 1);
}

constexpr std::uint32_t Place(std::uint32_t value, int lo) {
  return value << lo;
}

void CheckField(const char* name, std::uint32_t value, std::uint32_t max) {
  if (value > max) {
    throw Error(ErrorCode::kFieldOverflow,
                std::string(name) + " = " + std::to_string(value) +
                    " exceeds " + std::to_string(max));
  }
}

std::uint32_t Header(std::uint32_t funct3) {
  return kCustom0Opcode | Place(funct3, 12);
}

std::uint32_t EncodeMem(std::uint32_t funct3, std::uint8_t reg,
                        std::uint8_t base, std::uint16_t count) {
  CheckField("register", reg, kNumRegs - 1);
  CheckField("base", base, kNumRegs - 1);
  CheckField("count", count, kMaxCount);
  return Header(funct3) | Place(reg, 7) | Place(base, 15) | Place(count, 20);
}

struct Encoder {
  std::uint32_t operator()(const VsaCfg& i) const {
    std::uint32_t prec = 0;
    switch (i.precision) {
      case Precision::kP4: prec = 0b00; break;
      case Precision::kP8: prec = 0b01; break;
      case Precision::kP16: prec = 0b10; break;
    }
    const std::uint32_t df = i.dataflow == Dataflow::kCF ? 1 : 0;
    return Header(kFunctVsaCfg) | Place(prec, 20) | Place(df, 22);
  }
  std::uint32_t operator()(const VsaLd& i) const {
    return EncodeMem(kFunctVsaLd, i.vd, i.base, i.count);
  }
  std::uint32_t operator()(const VsaM& i) const {
    CheckField("vs1", i.vs1, kNumRegs - 1);
    CheckField("vs2", i.vs2, kNumRegs - 1);
    CheckField("acc", i.acc, kNumRegs - 1);
    CheckField("steps", i.steps, kMaxSteps);
    if (i.steps == 0) {
      throw Error(ErrorCode::kFieldOverflow, "steps must be at least 1");
    }
    const std::uint32_t funct3 = (i.steps >> 7) ? kFunctVsaMHi : kFunctVsaM;
    return Header(funct3) | Place(i.acc, 7) | Place(i.vs1, 15) |
           Place(i.vs2, 20) | Place(i.steps & 0x7f, 25);
  }
  std::uint32_t operator()(const VSetCfg& i) const {
    CheckField("row_pitch", i.row_pitch, kMaxRowPitch);
    CheckField("run", i.run, kMaxRun);
    return Header(kFunctVSetCfg) | Place(i.row_pitch, 15) | Place(i.run, 24);
  }
  std::uint32_t operator()(const Vle& i) const {
    return EncodeMem(kFunctVle, i.vd, i.base, i.count);
  }
  std::uint32_t operator()(const Vse& i) const {
    return EncodeMem(kFunctVse, i.vs, i.base, i.count);
  }
};

void RequireZero(std::uint32_t word, int hi, int lo, const char* what) {
  if (Bits(word, hi, lo) != 0) {
    throw Error(ErrorCode::kReservedField,
                std::string(what) + " bits [" + std::to_string(hi) + ":" +
                    std::to_string(lo) + "] must be zero");
  }
}

}  // namespace

Precision ParsePrecision(std::string_view text) {
  if (!text.empty() && (text.front() == 'e' || text.front() == 'E')) {
    text.remove_prefix(1);
  }
  if (text == "4") return Precision::kP4;
  if (text == "8") return Precision::kP8;
  if (text == "16") return Precision::kP16;
  throw Error(ErrorCode::kConfigError,
              "unknown precision '" + std::string(text) + "'");
}

std::string_view PrecisionName(Precision p) {
  switch (p) {
    case Precision::kP4: return "e4";
    case Precision::kP8: return "e8";
    case Precision::kP16: return "e16";
  }
  return "?";
}

Dataflow ParseDataflow(std::string_view text) {
  if (text == "ff" || text == "FF") return Dataflow::kFF;
  if (text == "cf" || text == "CF") return Dataflow::kCF;
  throw Error(ErrorCode::kConfigError,
              "unknown dataflow '" + std::string(text) + "'");
}

std::string_view DataflowName(Dataflow d) {
  return d == Dataflow::kFF ? "ff" : "cf";
}

std::uint32_t Encode(const Instruction& instr) {
  return std::visit(Encoder{}, instr);
}

Instruction Decode(std::uint32_t word) {
  if (Bits(word, 6, 0) != kCustom0Opcode) {
    throw Error(ErrorCode::kIllegalInstruction,
                "unknown major opcode in word " + std::to_string(word));
  }
  const auto rd = static_cast<std::uint8_t>(Bits(word, 11, 7));
  const auto rs1 = static_cast<std::uint8_t>(Bits(word, 19, 15));
  const auto count = static_cast<std::uint16_t>(Bits(word, 31, 20));
  switch (Bits(word, 14, 12)) {
    case kFunctVsaCfg: {
      RequireZero(word, 11, 7, "VSACFG");
      RequireZero(word, 19, 15, "VSACFG");
      RequireZero(word, 31, 23, "VSACFG");
      VsaCfg cfg;
      switch (Bits(word, 21, 20)) {
        case 0b00: cfg.precision = Precision::kP4; break;
        case 0b01: cfg.precision = Precision::kP8; break;
        case 0b10: cfg.precision = Precision::kP16; break;
        default:
          throw Error(ErrorCode::kReservedField,
                      "VSACFG precision code 0b11 is reserved");
      }
      cfg.dataflow = Bits(word, 22, 22) ? Dataflow::kCF : Dataflow::kFF;
      return cfg;
    }
    case kFunctVsaLd:
      return VsaLd{rd, rs1, count};
    case kFunctVsaM:
    case kFunctVsaMHi: {
      VsaM m;
      m.acc = rd;
      m.vs1 = rs1;
      m.vs2 = static_cast<std::uint8_t>(Bits(word, 24, 20));
      m.steps = static_cast<std::uint16_t>((Bits(word, 14, 14) << 7) |
                                           Bits(word, 31, 25));
      if (m.steps == 0) {
        throw Error(ErrorCode::kIllegalInstruction, "VSAM with zero steps");
      }
      return m;
    }
    case kFunctVSetCfg: {
      RequireZero(word, 11, 7, "VSETCFG");
      VSetCfg c;
      c.row_pitch = static_cast<std::uint16_t>(Bits(word, 23, 15));
      c.run = static_cast<std::uint8_t>(Bits(word, 31, 24));
      return c;
    }
    case kFunctVle:
      return Vle{rd, rs1, count};
    case kFunctVse:
      return Vse{rd, rs1, count};
    default:
      throw Error(ErrorCode::kIllegalInstruction, "funct3 0b111 is unassigned");
  }
}

std::string_view Mnemonic(const Instruction& instr) {
  static constexpr std::string_view kNames[] = {"vsacfg",  "vsald", "vsam",
                                                "vsetcfg", "vle",   "vse"};
  return kNames[instr.index()];
}

std::string Disassemble(const Instruction& instr) {
  auto v = [](unsigned r) { return "v" + std::to_string(r); };
  auto x = [](unsigned r) { return "x" + std::to_string(r); };
  std::string out(Mnemonic(instr));
  out += ' ';
  std::visit(
      [&](const auto& i) {
        using T = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<T, VsaCfg>) {
          out += std::string(PrecisionName(i.precision)) + ", " +
                 std::string(DataflowName(i.dataflow));
        } else if constexpr (std::is_same_v<T, VsaLd> ||
                             std::is_same_v<T, Vle>) {
          out += v(i.vd) + ", " + x(i.base) + ", " + std::to_string(i.count);
        } else if constexpr (std::is_same_v<T, Vse>) {
          out += v(i.vs) + ", " + x(i.base) + ", " + std::to_string(i.count);
        } else if constexpr (std::is_same_v<T, VsaM>) {
          out += v(i.vs1) + ", " + v(i.vs2) + ", " + v(i.acc) + ", " +
                 std::to_string(i.steps);
        } else {
          out += std::to_string(i.row_pitch) + ", " + std::to_string(i.run);
        }
      },
      instr);
  return out;
}

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

class LineParser {
 public:
  LineParser(int line, std::vector<std::string_view> operands)
      : line_(line), operands_(std::move(operands)) {}

  void Expect(std::size_t n, std::string_view mnemonic) const {
    if (operands_.size() != n) {
      throw Error::AtLine(line_, std::string(mnemonic) + " expects " +
                                     std::to_string(n) + " operands, got " +
                                     std::to_string(operands_.size()));
    }
  }

  std::uint32_t Integer(std::size_t i, std::uint32_t max) const {
    std::string_view tok = operands_[i];
    int base = 10;
    if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X')) {
      tok.remove_prefix(2);
      base = 16;
    }
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(),
                                     value, base);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
      throw Error::AtLine(line_, "bad integer '" +
                                     std::string(operands_[i]) + "'");
    }
    if (value > max) {
      throw Error::AtLine(line_, "value " + std::to_string(value) +
                                     " out of range (max " +
                                     std::to_string(max) + ")");
    }
    return static_cast<std::uint32_t>(value);
  }

  std::uint8_t Reg(std::size_t i, char prefix) const {
    std::string_view tok = operands_[i];
    if (tok.size() < 2 || tok[0] != prefix) {
      throw Error::AtLine(line_, "expected " + std::string(1, prefix) +
                                     "-register, got '" + std::string(tok) +
                                     "'");
    }
    std::uint32_t idx = 0;
    auto [ptr, ec] =
        std::from_chars(tok.data() + 1, tok.data() + tok.size(), idx);
    if (ec != std::errc() || ptr != tok.data() + tok.size() ||
        idx >= kNumRegs) {
      throw Error::AtLine(line_, "bad register '" + std::string(tok) + "'");
    }
    return static_cast<std::uint8_t>(idx);
  }

  std::string_view Token(std::size_t i) const { return operands_[i]; }
  int line() const { return line_; }

 private:
  int line_;
  std::vector<std::string_view> operands_;
};

Instruction ParseLine(int line, std::string_view mnemonic,
                      std::string_view rest) {
  std::vector<std::string_view> operands;
  if (!Trim(rest).empty()) {
    while (true) {
      const auto comma = rest.find(',');
      operands.push_back(Trim(rest.substr(0, comma)));
      if (operands.back().empty()) {
        throw Error::AtLine(line, "empty operand");
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  LineParser p(line, std::move(operands));
  if (mnemonic == "vsacfg") {
    p.Expect(2, mnemonic);
    VsaCfg c;
    try {
      c.precision = ParsePrecision(p.Token(0));
      c.dataflow = ParseDataflow(p.Token(1));
    } catch (const Error& e) {
      throw Error::AtLine(line, e.message());
    }
    if (p.Token(0).front() != 'e') {
      throw Error::AtLine(line, "precision must be e4, e8 or e16");
    }
    return c;
  }
  if (mnemonic == "vsald" || mnemonic == "vle" || mnemonic == "vse") {
    p.Expect(3, mnemonic);
    const auto reg = p.Reg(0, 'v');
    const auto base = p.Reg(1, 'x');
    const auto count = static_cast<std::uint16_t>(p.Integer(2, kMaxCount));
    if (mnemonic == "vsald") return VsaLd{reg, base, count};
    if (mnemonic == "vle") return Vle{reg, base, count};
    return Vse{reg, base, count};
  }
  if (mnemonic == "vsam") {
    p.Expect(4, mnemonic);
    VsaM m;
    m.vs1 = p.Reg(0, 'v');
    m.vs2 = p.Reg(1, 'v');
    m.acc = p.Reg(2, 'v');
    m.steps = static_cast<std::uint16_t>(p.Integer(3, kMaxSteps));
    if (m.steps == 0) throw Error::AtLine(line, "steps must be at least 1");
    return m;
  }
  if (mnemonic == "vsetcfg") {
    p.Expect(2, mnemonic);
    VSetCfg c;
    c.row_pitch = static_cast<std::uint16_t>(p.Integer(0, kMaxRowPitch));
    c.run = static_cast<std::uint8_t>(p.Integer(1, kMaxRun));
    return c;
  }
  throw Error::AtLine(line, "unknown mnemonic '" + std::string(mnemonic) + "'");
}

}  // namespace

std::vector<std::uint32_t> Assemble(std::string_view source) {
  std::vector<std::uint32_t> words;
  int line_no = 0;
  while (!source.empty()) {
    ++line_no;
    const auto nl = source.find('\n');
    std::string_view line = source.substr(0, nl);
    source.remove_prefix(nl == std::string_view::npos ? source.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    std::size_t split = 0;
    while (split < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[split]))) {
      ++split;
    }
    std::string mnemonic(line.substr(0, split));
    for (auto& ch : mnemonic) {
      ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    words.push_back(Encode(ParseLine(line_no, mnemonic, line.substr(split))));
  }
  return words;
}

}  // namespace speed
