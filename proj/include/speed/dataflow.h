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

#ifndef SPEED_DATAFLOW_H_
#define SPEED_DATAFLOW_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "speed/config.h"
#include "speed/isa.h"
#include "speed/layer.h"
#include "speed/machine.h"
#include "speed/memory.h"
#include "speed/sau.h"
#include "speed/tensor.h"

namespace speed {

// Scalar register that carries load/store addresses in lowered programs.
inline constexpr int kAddrReg = 10;

// ic_par input channels packed per (y, x).
struct PackedGrid {
  Precision precision = Precision::kP16;
  int groups = 0;
  int h = 0;
  int w = 0;
  std::vector<PackedElement> elements;  // [group][y][x]

  const PackedElement& at(int g, int y, int x) const {
    return elements[(static_cast<std::size_t>(g) * h + y) * w + x];
  }
};

PackedGrid PackTensor(const Tensor& t, Precision p);
// Drops channels at index >= cin (the zero padding).
Tensor UnpackTensor(const PackedGrid& grid, int cin);

// Byte regions of the staged external memory.
struct MemoryLayout {
  std::uint64_t zero_base = 0;
  std::uint64_t zero_bytes = 0;
  std::uint64_t input_base = 0;
  std::uint64_t input_bytes = 0;
  std::uint64_t weight_base = 0;
  std::uint64_t weight_bytes = 0;
  std::uint64_t output_base = 0;
  std::uint64_t output_bytes = 0;
  int padded_h = 0;  // rows held per input column, pad rows included
  int padded_w = 0;
  std::uint64_t total() const { return output_base + output_bytes; }
};

struct LoadDesc {
  enum class Kind : std::uint8_t { kInput, kWeight, kZero };
  Kind kind = Kind::kInput;
  bool broadcast = true;  // VSALD if set, VLE otherwise
  int vd = 0;
  std::uint64_t addr = 0;
  int count = 0;
};

struct TileDesc {
  int vs1 = 0;
  int vs2 = 0;
  int acc = 0;
  int steps = 0;
};

struct StoreDesc {
  int vs = 0;
  std::uint64_t addr = 0;
  int count = 0;
};

struct Stage {
  std::vector<LoadDesc> prefetch;
  std::optional<StreamGeometry> geometry;  // VSETCFG before the compute
  std::vector<TileDesc> compute;
  std::optional<StoreDesc> writeback;
  // Registers carried over from the previous stage and not reloaded.
  std::vector<int> reuse_from_prev;
  // Input elements per lane inside the carried-over registers.
  int reuse_elements = 0;
  void Clear();
};

struct Schedule {
  LayerSpec layer;
  MachineConfig cfg;
  Dataflow strategy = Dataflow::kFF;
  int tile_h = 0;
  int elems_per_reg = 0;
  int groups = 0;        // packed input-channel groups
  int patch_h = 0;       // input rows behind one output band
  int out_blocks = 0;    // output-channel blocks of lanes * tile_c
  int bands = 0;         // output row bands of tile_h
  // FF
  int weight_regs = 0;
  int chunk_w = 0;       // output columns per chunk
  int chunks = 0;
  // CF
  int stage_groups = 0;  // channel groups per CF stage
  int channel_stages = 0;
  MemoryLayout mem;
  std::uint64_t est_cycles = 0;
  std::uint64_t vrf_peak_bits = 0;
  std::uint64_t stage_count = 0;
  std::uint64_t instruction_count = 0;
  std::uint64_t input_load_bytes = 0;
  std::uint64_t no_reuse_input_load_bytes = 0;
  std::uint64_t weight_load_bytes = 0;
  std::uint64_t output_store_bytes = 0;
};

// Throw Error(kInfeasible) when no tiling fits the machine.
Schedule PlanFF(const LayerSpec& layer, const MachineConfig& cfg);
Schedule PlanCF(const LayerSpec& layer, const MachineConfig& cfg);
Schedule Plan(const LayerSpec& layer, const MachineConfig& cfg, Dataflow d);

// Stages in execution order. The Stage reference is reused between calls.
void ForEachStage(const Schedule& s, const std::function<void(const Stage&)>& fn);
std::vector<Stage> Stages(const Schedule& s);

void ForEachIssue(const Schedule& s, const std::function<void(const Issue&)>& fn);
std::vector<Issue> Lower(const Schedule& s);

// External memory with the zero page, packed inputs and weights in load order.
ExternalMemory StageMemory(const Schedule& s, const Tensor& input,
                           const WeightTensor& weights);
// Accumulators in COHW order read back from the output region.
std::vector<Accumulator> ExtractAccumulators(const Schedule& s,
                                             const ExternalMemory& mem);
Tensor ExtractOutput(const Schedule& s, const ExternalMemory& mem,
                     unsigned shift);

struct StrategyChoice {
  Dataflow chosen = Dataflow::kCF;
  std::optional<std::uint64_t> ff_cycles;  // empty when infeasible
  std::optional<std::uint64_t> cf_cycles;
};

// Fewest estimated cycles; ties go to CF.
StrategyChoice SelectStrategy(const LayerSpec& layer, const MachineConfig& cfg);

std::string DumpSchedule(const Schedule& s, std::uint64_t max_stages = 16);

}  // namespace speed

#endif  // SPEED_DATAFLOW_H_
