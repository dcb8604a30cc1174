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

#ifndef SPEED_VRF_H_
#define SPEED_VRF_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace speed {

// One lane's slice of the vector register file: `num_regs` registers of
// `reg_bytes` bytes each. Writes are confined to one register; flat reads (used
// by the SAU operand requester) may span consecutive registers.
class Vrf {
 public:
  Vrf(int num_regs, int reg_bytes);

  int num_regs() const { return num_regs_; }
  int reg_bytes() const { return reg_bytes_; }
  std::size_t capacity_bytes() const { return storage_.size(); }

  // Throws Error(kOverflow) if [offset, offset + data.size()) leaves the
  // register, Error(kOutOfBounds) for a bad register index.
  void Write(int reg, std::size_t offset, std::span<const std::uint8_t> data);
  std::span<const std::uint8_t> Read(int reg, std::size_t offset,
                                     std::size_t n) const;
  std::span<const std::uint8_t> Register(int reg) const;

  // Byte range addressed from the start of v0. Throws Error(kOutOfBounds).
  std::span<const std::uint8_t> ReadFlat(std::size_t offset,
                                         std::size_t n) const;

 private:
  void CheckReg(int reg) const;

  int num_regs_;
  int reg_bytes_;
  std::vector<std::uint8_t> storage_;
};

}  // namespace speed

#endif  // SPEED_VRF_H_
