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

#ifndef SPEED_SAU_H_
#define SPEED_SAU_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "speed/config.h"
#include "speed/isa.h"

namespace speed {

// 32-bit two's-complement accumulator; all additions wrap modulo 2^32.
using Accumulator = std::int32_t;

constexpr Accumulator WrapAdd(Accumulator a, std::int64_t b) {
  return static_cast<Accumulator>(static_cast<std::uint32_t>(a) +
                                  static_cast<std::uint32_t>(b));
}

// One PE operand bundle: IcPar(precision) signed operands along the input
// channel dimension.
class PackedElement {
 public:
  PackedElement() = default;
  // Throws Error(kShapeMismatch) if operands.size() != IcPar(p) and
  // Error(kFieldOverflow) if an operand is outside the precision's range.
  PackedElement(Precision p, std::span<const int> operands);

  static PackedElement Zero(Precision p);
  // Decodes ElementBits(p) / 8 little-endian bytes; operand i occupies bits
  // [i*b, (i+1)*b).
  static PackedElement FromBytes(Precision p, std::span<const std::uint8_t> bytes);
  void ToBytes(std::span<std::uint8_t> out) const;

  Precision precision() const { return precision_; }
  int size() const { return IcPar(precision_); }
  int operator[](int i) const { return operands_[static_cast<std::size_t>(i)]; }

  friend bool operator==(const PackedElement& a, const PackedElement& b) {
    return a.precision_ == b.precision_ && a.operands_ == b.operands_;
  }

 private:
  Precision precision_ = Precision::kP16;
  std::array<std::int16_t, 16> operands_{};
};

// acc + sum_i a[i] * w[i]. Throws Error(kPrecisionMismatch).
Accumulator PeDot(const PackedElement& a, const PackedElement& w,
                  Accumulator acc);

// Occupancy model of one SAU queue. Push fails (backpressure) when full.
class QueueModel {
 public:
  explicit QueueModel(int depth) : depth_(depth) {}

  bool Push();
  bool Pop();

  int depth() const { return depth_; }
  int occupancy() const { return occupancy_; }
  int peak() const { return peak_; }
  std::uint64_t pushed() const { return pushed_; }
  std::uint64_t popped() const { return popped_; }
  std::uint64_t stalls() const { return stalls_; }

 private:
  int depth_;
  int occupancy_ = 0;
  int peak_ = 0;
  std::uint64_t pushed_ = 0;
  std::uint64_t popped_ = 0;
  std::uint64_t stalls_ = 0;
};

struct SauState {
  SauState(int tile_r, int tile_c, int queue_depth);

  Accumulator& at(int r, int c) {
    return acc[static_cast<std::size_t>(r * tile_c + c)];
  }
  Accumulator at(int r, int c) const {
    return acc[static_cast<std::size_t>(r * tile_c + c)];
  }
  void ClearGrid();

  int tile_r;
  int tile_c;
  std::vector<Accumulator> acc;  // row-major tile_r x tile_c
  QueueModel input_q;
  QueueModel weight_q;
  QueueModel acc_q;
  QueueModel output_q;
  // Register whose accumulators are held in `acc` under CF. Empty when the
  // grid carries no pending results.
  std::optional<int> resident_acc;
};

using OperandStream = std::vector<PackedElement>;

// Streams `steps` element pairs through the array:
//   acc[r][c] += sum_{s < steps} dot(rows[r][s], cols[c][s]).
// Returns the cycle count: 0 for steps == 0, else tile_r + tile_c - 1 + steps.
// Throws Error(kShapeMismatch) for a wrong number of feed lanes and
// Error(kStreamUnderrun) if a feed lane holds fewer than `steps` elements.
std::uint64_t RunTile(std::span<const OperandStream> rows,
                      std::span<const OperandStream> cols, int steps,
                      SauState& state);

// Moves the accumulator grid through the output queue; returns tile_c cycles.
std::uint64_t DrainTile(SauState& state);

// Operand-requester address generation (see docs/encoding.md).
struct StreamGeometry {
  int row_pitch = 0;
  int run = 0;  // 0: never advance to the next register
  friend bool operator==(const StreamGeometry&, const StreamGeometry&) = default;
};

// Flat per-lane element index for PE row `row` at step `step`.
std::uint64_t InputElementIndex(const StreamGeometry& g, int elems_per_reg,
                                int vs1, int row, int step);
// Flat per-lane element index for PE column `col` at step `step`.
std::uint64_t WeightElementIndex(int elems_per_reg, int vs2, int col,
                                 int step, int steps);

enum class OperandClass : std::uint8_t { kAccumulator, kWeight, kInput };

struct OperandRequest {
  std::uint64_t cycle;
  OperandClass kind;
  std::uint64_t addr;
  friend bool operator==(const OperandRequest&, const OperandRequest&) = default;
};

struct OperandDemand {
  std::vector<std::uint64_t> accumulators;
  std::vector<std::uint64_t> weights;
  std::vector<std::uint64_t> inputs;
};

// Fixed-priority arbiter: accumulator refills, then weights, then inputs; at
// most `ports` requests per cycle. Cycles are numbered from 0.
std::vector<OperandRequest> RequestOperands(const OperandDemand& demand,
                                            int ports = 1);

// Element-address demand of one tile (no accumulator refills).
OperandDemand TileDemand(const StreamGeometry& g, int elems_per_reg, int vs1,
                         int vs2, int steps, int tile_r, int tile_c);

struct ParallelismDims {
  int ic;  // within a PE, along input channels
  int oc;  // across PE columns, along output channels
  int fh;  // across PE rows, along feature-map height
  int macs_per_cycle() const { return ic * oc * fh; }
};

ParallelismDims GetParallelismDims(const MachineConfig& cfg, Precision p);

}  // namespace speed

#endif  // SPEED_SAU_H_
