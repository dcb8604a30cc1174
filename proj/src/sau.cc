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

#include "speed/sau.h"

#include <algorithm>
#include <string>

#include "speed/error.h"

namespace speed {

PackedElement::PackedElement(Precision p, std::span<const int> operands)
    : precision_(p) {
  if (static_cast<int>(operands.size()) != IcPar(p)) {
    throw Error(ErrorCode::kShapeMismatch,
                "element at " + std::string(PrecisionName(p)) + " needs " +
                    std::to_string(IcPar(p)) + " operands, got " +
                    std::to_string(operands.size()));
  }
  for (std::size_t i = 0; i < operands.size(); ++i) {
    if (operands[i] < OperandMin(p) || operands[i] > OperandMax(p)) {
      throw Error(ErrorCode::kFieldOverflow,
                  "operand " + std::to_string(operands[i]) + " out of range for " +
                      std::string(PrecisionName(p)));
    }
    operands_[i] = static_cast<std::int16_t>(operands[i]);
  }
}

PackedElement PackedElement::Zero(Precision p) {
  PackedElement e;
  e.precision_ = p;
  return e;
}

PackedElement PackedElement::FromBytes(Precision p,
                                       std::span<const std::uint8_t> bytes) {
  PackedElement e;
  e.precision_ = p;
  const int bits = OperandBits(p);
  const int n = IcPar(p);
  std::uint64_t raw = 0;
  for (int i = ElementBits(p) / 8 - 1; i >= 0; --i) {
    raw = (raw << 8) | bytes[static_cast<std::size_t>(i)];
  }
  const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
  const std::uint64_t sign = std::uint64_t{1} << (bits - 1);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t field = (raw >> (i * bits)) & mask;
    const auto value = static_cast<std::int64_t>(field ^ sign) -
                       static_cast<std::int64_t>(sign);
    e.operands_[static_cast<std::size_t>(i)] = static_cast<std::int16_t>(value);
  }
  return e;
}

void PackedElement::ToBytes(std::span<std::uint8_t> out) const {
  const int bits = OperandBits(precision_);
  const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
  std::uint64_t raw = 0;
  for (int i = 0; i < size(); ++i) {
    raw |= (static_cast<std::uint64_t>(operands_[static_cast<std::size_t>(i)]) & mask)
           << (i * bits);
  }
  for (int i = 0; i < ElementBits(precision_) / 8; ++i) {
    out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(raw >> (8 * i));
  }
}

Accumulator PeDot(const PackedElement& a, const PackedElement& w,
                  Accumulator acc) {
  if (a.precision() != w.precision()) {
    throw Error(ErrorCode::kPrecisionMismatch,
                std::string(PrecisionName(a.precision())) + " input with " +
                    std::string(PrecisionName(w.precision())) + " weight");
  }
  std::int64_t sum = 0;
  for (int i = 0; i < a.size(); ++i) sum += std::int64_t{a[i]} * w[i];
  return WrapAdd(acc, sum);
}

bool QueueModel::Push() {
  if (occupancy_ == depth_) {
    ++stalls_;
    return false;
  }
  ++occupancy_;
  ++pushed_;
  peak_ = std::max(peak_, occupancy_);
  return true;
}

bool QueueModel::Pop() {
  if (occupancy_ == 0) return false;
  --occupancy_;
  ++popped_;
  return true;
}

SauState::SauState(int tile_r, int tile_c, int queue_depth)
    : tile_r(tile_r),
      tile_c(tile_c),
      acc(static_cast<std::size_t>(tile_r * tile_c), 0),
      input_q(queue_depth),
      weight_q(queue_depth),
      acc_q(queue_depth),
      output_q(queue_depth) {}

void SauState::ClearGrid() { std::fill(acc.begin(), acc.end(), 0); }

namespace {

// The requester pushes `n` operands; when the queue is full the core consumes
// the head before the next push. Everything is consumed by the end.
void Stream(QueueModel& q, int n) {
  for (int i = 0; i < n; ++i) {
    if (!q.Push()) {
      q.Pop();
      q.Push();
    }
  }
  while (q.Pop()) {
  }
}

}  // namespace

std::uint64_t RunTile(std::span<const OperandStream> rows,
                      std::span<const OperandStream> cols, int steps,
                      SauState& state) {
  if (static_cast<int>(rows.size()) != state.tile_r ||
      static_cast<int>(cols.size()) != state.tile_c) {
    throw Error(ErrorCode::kShapeMismatch,
                "tile is " + std::to_string(state.tile_r) + "x" +
                    std::to_string(state.tile_c) + " but got " +
                    std::to_string(rows.size()) + " input and " +
                    std::to_string(cols.size()) + " weight feed lanes");
  }
  if (steps <= 0) return 0;
  for (const auto& s : rows) {
    if (static_cast<int>(s.size()) < steps) {
      throw Error(ErrorCode::kStreamUnderrun,
                  "input feed lane has " + std::to_string(s.size()) +
                      " of " + std::to_string(steps) + " elements");
    }
  }
  for (const auto& s : cols) {
    if (static_cast<int>(s.size()) < steps) {
      throw Error(ErrorCode::kStreamUnderrun,
                  "weight feed lane has " + std::to_string(s.size()) +
                      " of " + std::to_string(steps) + " elements");
    }
  }
  for (int s = 0; s < steps; ++s) {
    Stream(state.input_q, state.tile_r);
    Stream(state.weight_q, state.tile_c);
    for (int r = 0; r < state.tile_r; ++r) {
      const PackedElement& a = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)];
      for (int c = 0; c < state.tile_c; ++c) {
        state.at(r, c) =
            PeDot(a, cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)],
                  state.at(r, c));
      }
    }
  }
  return static_cast<std::uint64_t>(state.tile_r + state.tile_c - 1 + steps);
}

std::uint64_t DrainTile(SauState& state) {
  Stream(state.output_q, state.tile_r * state.tile_c);
  return static_cast<std::uint64_t>(state.tile_c);
}

std::uint64_t InputElementIndex(const StreamGeometry& g, int elems_per_reg,
                                int vs1, int row, int step) {
  const std::uint64_t e = static_cast<std::uint64_t>(elems_per_reg);
  std::uint64_t reg_advance = 0;
  std::uint64_t within = static_cast<std::uint64_t>(step);
  if (g.run > 0) {
    reg_advance = static_cast<std::uint64_t>(step / g.run);
    within = static_cast<std::uint64_t>(step % g.run);
  }
  return (static_cast<std::uint64_t>(vs1) + reg_advance) * e +
         static_cast<std::uint64_t>(row) * static_cast<std::uint64_t>(g.row_pitch) +
         within;
}

std::uint64_t WeightElementIndex(int elems_per_reg, int vs2, int col,
                                 int step, int steps) {
  return static_cast<std::uint64_t>(vs2) * static_cast<std::uint64_t>(elems_per_reg) +
         static_cast<std::uint64_t>(col) * static_cast<std::uint64_t>(steps) +
         static_cast<std::uint64_t>(step);
}

std::vector<OperandRequest> RequestOperands(const OperandDemand& demand,
                                            int ports) {
  std::vector<OperandRequest> out;
  out.reserve(demand.accumulators.size() + demand.weights.size() +
              demand.inputs.size());
  std::size_t next[3] = {0, 0, 0};
  const std::vector<std::uint64_t>* classes[3] = {
      &demand.accumulators, &demand.weights, &demand.inputs};
  constexpr OperandClass kKinds[3] = {OperandClass::kAccumulator,
                                      OperandClass::kWeight,
                                      OperandClass::kInput};
  std::uint64_t cycle = 0;
  while (true) {
    int issued = 0;
    for (int k = 0; k < 3 && issued < ports; ++k) {
      while (issued < ports && next[k] < classes[k]->size()) {
        out.push_back({cycle, kKinds[k], (*classes[k])[next[k]++]});
        ++issued;
      }
    }
    if (issued == 0) break;
    ++cycle;
  }
  return out;
}

OperandDemand TileDemand(const StreamGeometry& g, int elems_per_reg, int vs1,
                         int vs2, int steps, int tile_r, int tile_c) {
  OperandDemand d;
  for (int s = 0; s < steps; ++s) {
    for (int c = 0; c < tile_c; ++c) {
      d.weights.push_back(WeightElementIndex(elems_per_reg, vs2, c, s, steps));
    }
    for (int r = 0; r < tile_r; ++r) {
      d.inputs.push_back(InputElementIndex(g, elems_per_reg, vs1, r, s));
    }
  }
  return d;
}

ParallelismDims GetParallelismDims(const MachineConfig& cfg, Precision p) {
  return {IcPar(p), cfg.tile_c, cfg.tile_r};
}

}  // namespace speed
