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

#ifndef SPEED_MEMORY_H_
#define SPEED_MEMORY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace speed {

// Flat byte-addressable external memory. Out-of-range accesses throw
// Error(kOutOfBounds); addresses never wrap.
class ExternalMemory {
 public:
  ExternalMemory() = default;
  explicit ExternalMemory(std::size_t size) : bytes_(size, 0) {}

  std::size_t size() const { return bytes_.size(); }

  std::span<const std::uint8_t> Read(std::uint64_t addr, std::size_t n) const;
  void Write(std::uint64_t addr, std::span<const std::uint8_t> data);

  void WriteU32(std::uint64_t addr, std::uint32_t value);
  std::uint32_t ReadU32(std::uint64_t addr) const;

  // Copies a raw binary file to [base, base + file size), growing the memory
  // if needed.
  void LoadImage(const std::string& path, std::uint64_t base);

  std::span<std::uint8_t> bytes() { return bytes_; }
  std::span<const std::uint8_t> bytes() const { return bytes_; }

 private:
  void Check(std::uint64_t addr, std::size_t n) const;

  std::vector<std::uint8_t> bytes_;
};

}  // namespace speed

#endif  // SPEED_MEMORY_H_
