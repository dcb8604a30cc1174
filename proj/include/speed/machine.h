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

#ifndef SPEED_MACHINE_H_
#define SPEED_MACHINE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "speed/config.h"
#include "speed/isa.h"
#include "speed/memory.h"
#include "speed/sau.h"
#include "speed/timing.h"
#include "speed/vrf.h"

namespace speed {

// What the host driver hands the vector unit: the instruction plus the value
// of its scalar base register.
struct Issue {
  Instruction instr;
  std::uint64_t rs1 = 0;
  friend bool operator==(const Issue&, const Issue&) = default;
};

struct Csr {
  std::optional<Precision> precision;  // unset until the first VSACFG
  Dataflow dataflow = Dataflow::kFF;
  StreamGeometry geometry;
};

struct TraceEvent {
  std::uint64_t pc = 0;
  Instruction instr;
  std::uint64_t start_cycle = 0;
  std::uint64_t cycles = 0;
  std::uint64_t mem_read_bytes = 0;
  std::uint64_t mem_write_bytes = 0;
  std::uint64_t vrf_write_bytes = 0;  // summed over lanes
  // Loads only: FNV-1a of the destination register in each lane, and whether
  // all lanes hold the same bytes.
  std::vector<std::uint64_t> lane_digests;
  bool lanes_identical = false;
};

std::uint64_t Fnv1a(std::span<const std::uint8_t> bytes);

class Machine {
 public:
  // With functional == false only timing state is kept: no VRF or memory
  // traffic happens, and the memory argument is ignored.
  explicit Machine(const MachineConfig& cfg, ExternalMemory mem = {},
                   bool functional = true);

  // Executes one instruction and returns its cycles. Errors carry the pc.
  std::uint64_t Execute(const Issue& issue);
  void Run(std::span<const Issue> program);

  void EnableTrace(bool on) { tracing_ = on; }
  const std::vector<TraceEvent>& trace() const { return trace_; }

  const MachineConfig& config() const { return cfg_; }
  const Csr& csr() const { return csr_; }
  std::uint64_t cycle() const { return cycle_; }
  std::uint64_t pc() const { return pc_; }
  const Vrf& lane_vrf(int lane) const { return vrfs_[static_cast<std::size_t>(lane)]; }
  Vrf& lane_vrf(int lane) { return vrfs_[static_cast<std::size_t>(lane)]; }
  const SauState& lane_sau(int lane) const { return saus_[static_cast<std::size_t>(lane)]; }
  ExternalMemory& memory() { return mem_; }
  const ExternalMemory& memory() const { return mem_; }

  // Elements of the current precision per register per lane.
  int ElemsPerReg() const;

 private:
  std::uint64_t Dispatch(const Issue& issue, TraceEvent& ev);
  std::uint64_t ExecVsaCfg(const VsaCfg& in);
  std::uint64_t ExecVSetCfg(const VSetCfg& in);
  std::uint64_t ExecVsaLd(const VsaLd& in, std::uint64_t addr, TraceEvent& ev);
  std::uint64_t ExecVle(const Vle& in, std::uint64_t addr, TraceEvent& ev);
  std::uint64_t ExecVse(const Vse& in, std::uint64_t addr, TraceEvent& ev);
  std::uint64_t ExecVsaM(const VsaM& in, TraceEvent& ev);
  Precision RequirePrecision(const char* what) const;
  // Writes every lane's resident grid back to its VRF; returns cycles spent.
  std::uint64_t FlushResident(TraceEvent& ev);
  void LoadGrid(int lane, int acc_reg);
  void StoreGrid(int lane, int acc_reg, TraceEvent& ev);
  void GatherStreams(int lane, const VsaM& in, Precision p);

  MachineConfig cfg_;
  CostModel cost_;
  OverlapWindow overlap_;
  ExternalMemory mem_;
  bool functional_;
  std::vector<Vrf> vrfs_;
  std::vector<SauState> saus_;
  Csr csr_;
  std::uint64_t cycle_ = 0;
  std::uint64_t pc_ = 0;
  bool tracing_ = false;
  std::vector<TraceEvent> trace_;
  std::vector<OperandStream> rows_;
  std::vector<OperandStream> cols_;
};

}  // namespace speed

#endif  // SPEED_MACHINE_H_
