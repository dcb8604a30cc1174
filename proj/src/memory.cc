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

#include "speed/memory.h"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "speed/error.h"

namespace speed {

void ExternalMemory::Check(std::uint64_t addr, std::size_t n) const {
  if (addr > bytes_.size() || n > bytes_.size() - addr) {
    throw Error(ErrorCode::kOutOfBounds,
                "memory access [" + std::to_string(addr) + ", +" +
                    std::to_string(n) + ") outside " +
                    std::to_string(bytes_.size()) + "-byte memory");
  }
}

std::span<const std::uint8_t> ExternalMemory::Read(std::uint64_t addr,
                                                   std::size_t n) const {
  Check(addr, n);
  return std::span<const std::uint8_t>(bytes_).subspan(addr, n);
}

void ExternalMemory::Write(std::uint64_t addr,
                           std::span<const std::uint8_t> data) {
  Check(addr, data.size());
  std::copy(data.begin(), data.end(), bytes_.begin() + static_cast<std::ptrdiff_t>(addr));
}

void ExternalMemory::WriteU32(std::uint64_t addr, std::uint32_t value) {
  const std::uint8_t b[4] = {
      static_cast<std::uint8_t>(value), static_cast<std::uint8_t>(value >> 8),
      static_cast<std::uint8_t>(value >> 16),
      static_cast<std::uint8_t>(value >> 24)};
  Write(addr, b);
}

std::uint32_t ExternalMemory::ReadU32(std::uint64_t addr) const {
  const auto b = Read(addr, 4);
  return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 |
         std::uint32_t{b[2]} << 16 | std::uint32_t{b[3]} << 24;
}

void ExternalMemory::LoadImage(const std::string& path, std::uint64_t base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (base + data.size() > bytes_.size()) bytes_.resize(base + data.size(), 0);
  Write(base, data);
}

}  // namespace speed
