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

#ifndef SPEED_TIMING_H_
#define SPEED_TIMING_H_

#include <cstdint>
#include <optional>

#include "speed/config.h"
#include "speed/isa.h"

namespace speed {

// Per-operation cycle formulas. Both the planner's estimate and the machine's
// cycle counter are built from these.
class CostModel {
 public:
  explicit CostModel(const MachineConfig& cfg) : cfg_(cfg) {}

  static constexpr std::uint64_t kConfigCycles = 1;

  // One memory burst: latency + ceil(bits / bandwidth).
  std::uint64_t Transfer(std::uint64_t bits) const;
  // Systolic pass: tile_r + tile_c - 1 + steps; 0 for steps == 0.
  std::uint64_t Tile(int steps) const;
  // Moving the accumulator grid out of the array.
  std::uint64_t Drain() const { return static_cast<std::uint64_t>(cfg_.tile_c); }

  const MachineConfig& config() const { return cfg_; }

 private:
  MachineConfig cfg_;
};

// With overlap_load_compute, loads directly following a VSAM run under it.
// The hiding budget is the VSAM's own cycle count; any other instruction
// closes the window.
class OverlapWindow {
 public:
  explicit OverlapWindow(bool enabled) : enabled_(enabled) {}

  // Returns the cycles charged for a load whose raw cost is `raw`.
  std::uint64_t ChargeLoad(std::uint64_t raw);
  void AfterCompute(std::uint64_t vsam_cycles);
  void Close() { budget_ = 0; }

 private:
  bool enabled_;
  std::uint64_t budget_ = 0;
};

// Abstract cycle walk over an instruction stream: tracks only what timing
// depends on (precision, dataflow, which accumulator grid is resident).
class TimingModel {
 public:
  explicit TimingModel(const MachineConfig& cfg)
      : cost_(cfg), overlap_(cfg.overlap_load_compute) {}

  // Returns the cycles charged to `instr` and adds them to total().
  std::uint64_t Charge(const Instruction& instr);
  std::uint64_t total() const { return total_; }

 private:
  std::uint64_t ElementBits() const;

  CostModel cost_;
  OverlapWindow overlap_;
  std::optional<Precision> precision_;
  Dataflow dataflow_ = Dataflow::kFF;
  std::optional<int> resident_;
  std::uint64_t total_ = 0;
};

}  // namespace speed

#endif  // SPEED_TIMING_H_
