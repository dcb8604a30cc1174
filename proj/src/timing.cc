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

#include "speed/timing.h"

#include <algorithm>
#include <type_traits>
#include <variant>

#include "speed/error.h"

namespace speed {

std::uint64_t CostModel::Transfer(std::uint64_t bits) const {
  const auto bw = static_cast<std::uint64_t>(cfg_.mem_bw_bits);
  return static_cast<std::uint64_t>(cfg_.mem_latency) + (bits + bw - 1) / bw;
}

std::uint64_t CostModel::Tile(int steps) const {
  if (steps <= 0) return 0;
  return static_cast<std::uint64_t>(cfg_.tile_r + cfg_.tile_c - 1 + steps);
}

std::uint64_t OverlapWindow::ChargeLoad(std::uint64_t raw) {
  if (!enabled_) return raw;
  const std::uint64_t hidden = std::min(raw, budget_);
  budget_ -= hidden;
  return raw - hidden;
}

void OverlapWindow::AfterCompute(std::uint64_t vsam_cycles) {
  budget_ = enabled_ ? vsam_cycles : 0;
}

std::uint64_t TimingModel::ElementBits() const {
  if (!precision_) {
    throw Error(ErrorCode::kUnconfiguredPrecision,
                "load issued before any VSACFG");
  }
  return static_cast<std::uint64_t>(speed::ElementBits(*precision_));
}

std::uint64_t TimingModel::Charge(const Instruction& instr) {
  std::uint64_t c = 0;
  std::visit(
      [&](const auto& in) {
        using T = std::decay_t<decltype(in)>;
        if constexpr (std::is_same_v<T, VsaCfg>) {
          precision_ = in.precision;
          dataflow_ = in.dataflow;
          overlap_.Close();
          c = CostModel::kConfigCycles;
        } else if constexpr (std::is_same_v<T, VSetCfg>) {
          overlap_.Close();
          c = CostModel::kConfigCycles;
        } else if constexpr (std::is_same_v<T, VsaLd> || std::is_same_v<T, Vle>) {
          c = overlap_.ChargeLoad(cost_.Transfer(in.count * ElementBits()));
        } else if constexpr (std::is_same_v<T, Vse>) {
          if (resident_) {
            c += cost_.Drain();
            resident_.reset();
          }
          c += cost_.Transfer(std::uint64_t{in.count} * 32);
          overlap_.Close();
        } else if constexpr (std::is_same_v<T, VsaM>) {
          ElementBits();
          if (dataflow_ == Dataflow::kFF) {
            if (resident_) c += cost_.Drain();
            resident_.reset();
            c += cost_.Tile(in.steps) + cost_.Drain();
          } else {
            if (resident_ && *resident_ != in.acc) c += cost_.Drain();
            resident_ = in.acc;
            c += cost_.Tile(in.steps);
          }
          overlap_.AfterCompute(c);
        }
      },
      instr);
  total_ += c;
  return c;
}

}  // namespace speed
