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

#include "speed/vrf.h"

#include <algorithm>
#include <string>

#include "speed/error.h"

namespace speed {

Vrf::Vrf(int num_regs, int reg_bytes)
    : num_regs_(num_regs),
      reg_bytes_(reg_bytes),
      storage_(static_cast<std::size_t>(num_regs) * reg_bytes, 0) {}

void Vrf::CheckReg(int reg) const {
  if (reg < 0 || reg >= num_regs_) {
    throw Error(ErrorCode::kOutOfBounds,
                "register v" + std::to_string(reg) + " does not exist");
  }
}

void Vrf::Write(int reg, std::size_t offset,
                std::span<const std::uint8_t> data) {
  CheckReg(reg);
  if (offset > static_cast<std::size_t>(reg_bytes_) ||
      data.size() > reg_bytes_ - offset) {
    throw Error(ErrorCode::kOverflow,
                std::to_string(data.size()) + " bytes at offset " +
                    std::to_string(offset) + " overflow register v" +
                    std::to_string(reg) + " (" + std::to_string(reg_bytes_) +
                    " bytes per lane)");
  }
  std::copy(data.begin(), data.end(),
            storage_.begin() + static_cast<std::ptrdiff_t>(
                                   static_cast<std::size_t>(reg) * reg_bytes_ + offset));
}

std::span<const std::uint8_t> Vrf::Read(int reg, std::size_t offset,
                                        std::size_t n) const {
  CheckReg(reg);
  if (offset > static_cast<std::size_t>(reg_bytes_) || n > reg_bytes_ - offset) {
    throw Error(ErrorCode::kOverflow, "read past the end of register v" +
                                          std::to_string(reg));
  }
  return std::span<const std::uint8_t>(storage_).subspan(
      static_cast<std::size_t>(reg) * reg_bytes_ + offset, n);
}

std::span<const std::uint8_t> Vrf::Register(int reg) const {
  return Read(reg, 0, static_cast<std::size_t>(reg_bytes_));
}

std::span<const std::uint8_t> Vrf::ReadFlat(std::size_t offset,
                                            std::size_t n) const {
  if (offset > storage_.size() || n > storage_.size() - offset) {
    throw Error(ErrorCode::kOutOfBounds,
                "VRF read at byte " + std::to_string(offset) +
                    " runs past v" + std::to_string(num_regs_ - 1));
  }
  return std::span<const std::uint8_t>(storage_).subspan(offset, n);
}

}  // namespace speed
