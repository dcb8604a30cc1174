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

#include "speed/machine.h"

#include <algorithm>
#include <cstring>
#include <type_traits>
#include <variant>

#include "speed/error.h"

namespace speed {

std::uint64_t Fnv1a(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Machine::Machine(const MachineConfig& cfg, ExternalMemory mem, bool functional)
    : cfg_(cfg),
      cost_(cfg),
      overlap_(cfg.overlap_load_compute),
      mem_(std::move(mem)),
      functional_(functional) {
  cfg_.Validate();
  for (int l = 0; l < cfg_.lanes; ++l) {
    vrfs_.emplace_back(functional_ ? cfg_.num_vregs : 0, cfg_.slice_bytes());
    saus_.emplace_back(cfg_.tile_r, cfg_.tile_c, cfg_.queue_depth);
  }
  rows_.resize(static_cast<std::size_t>(cfg_.tile_r));
  cols_.resize(static_cast<std::size_t>(cfg_.tile_c));
}

int Machine::ElemsPerReg() const {
  return cfg_.slice_bits() / ElementBits(RequirePrecision("register access"));
}

Precision Machine::RequirePrecision(const char* what) const {
  if (!csr_.precision) {
    throw Error(ErrorCode::kUnconfiguredPrecision,
                std::string(what) + " before any VSACFG");
  }
  return *csr_.precision;
}

std::uint64_t Machine::Execute(const Issue& issue) {
  TraceEvent ev;
  ev.pc = pc_;
  ev.start_cycle = cycle_;
  std::uint64_t c = 0;
  try {
    c = Dispatch(issue, ev);
  } catch (const Error& e) {
    throw e.WithPc(pc_);
  }
  cycle_ += c;
  if (tracing_) {
    ev.instr = issue.instr;
    ev.cycles = c;
    trace_.push_back(std::move(ev));
  }
  ++pc_;
  return c;
}

void Machine::Run(std::span<const Issue> program) {
  for (const Issue& issue : program) Execute(issue);
}

std::uint64_t Machine::Dispatch(const Issue& issue, TraceEvent& ev) {
  return std::visit(
      [&](const auto& in) -> std::uint64_t {
        using T = std::decay_t<decltype(in)>;
        if constexpr (std::is_same_v<T, VsaCfg>) return ExecVsaCfg(in);
        if constexpr (std::is_same_v<T, VSetCfg>) return ExecVSetCfg(in);
        if constexpr (std::is_same_v<T, VsaLd>) return ExecVsaLd(in, issue.rs1, ev);
        if constexpr (std::is_same_v<T, Vle>) return ExecVle(in, issue.rs1, ev);
        if constexpr (std::is_same_v<T, Vse>) return ExecVse(in, issue.rs1, ev);
        if constexpr (std::is_same_v<T, VsaM>) return ExecVsaM(in, ev);
      },
      issue.instr);
}

std::uint64_t Machine::ExecVsaCfg(const VsaCfg& in) {
  csr_.precision = in.precision;
  csr_.dataflow = in.dataflow;
  overlap_.Close();
  return CostModel::kConfigCycles;
}

std::uint64_t Machine::ExecVSetCfg(const VSetCfg& in) {
  csr_.geometry = {in.row_pitch, in.run};
  overlap_.Close();
  return CostModel::kConfigCycles;
}

std::uint64_t Machine::ExecVsaLd(const VsaLd& in, std::uint64_t addr,
                                 TraceEvent& ev) {
  const Precision p = RequirePrecision("VSALD");
  const std::uint64_t bytes = std::uint64_t{in.count} * ElementBits(p) / 8;
  if (functional_) {
    const auto data = mem_.Read(addr, bytes);
    for (auto& vrf : vrfs_) vrf.Write(in.vd, 0, data);
    ev.mem_read_bytes = bytes;
    ev.vrf_write_bytes = bytes * vrfs_.size();
    if (tracing_) {
      const auto first = vrfs_[0].Register(in.vd);
      ev.lanes_identical = true;
      for (const auto& vrf : vrfs_) {
        const auto reg = vrf.Register(in.vd);
        ev.lane_digests.push_back(Fnv1a(reg));
        if (!std::equal(reg.begin(), reg.end(), first.begin())) {
          ev.lanes_identical = false;
        }
      }
    }
  }
  return overlap_.ChargeLoad(cost_.Transfer(bytes * 8));
}

std::uint64_t Machine::ExecVle(const Vle& in, std::uint64_t addr,
                               TraceEvent& ev) {
  const Precision p = RequirePrecision("VLE");
  const std::size_t eb = static_cast<std::size_t>(ElementBits(p) / 8);
  const std::uint64_t bytes = std::uint64_t{in.count} * eb;
  if (functional_) {
    const auto data = mem_.Read(addr, bytes);
    const std::size_t lanes = vrfs_.size();
    for (std::size_t l = 0; l < lanes && l < in.count; ++l) {
      std::vector<std::uint8_t> slice;
      for (std::size_t i = l; i < in.count; i += lanes) {
        slice.insert(slice.end(), data.begin() + static_cast<std::ptrdiff_t>(i * eb),
                     data.begin() + static_cast<std::ptrdiff_t>((i + 1) * eb));
      }
      vrfs_[l].Write(in.vd, 0, slice);
    }
    ev.mem_read_bytes = bytes;
    ev.vrf_write_bytes = bytes;
    if (tracing_) {
      for (const auto& vrf : vrfs_) ev.lane_digests.push_back(Fnv1a(vrf.Register(in.vd)));
    }
  }
  return overlap_.ChargeLoad(cost_.Transfer(bytes * 8));
}

std::uint64_t Machine::ExecVse(const Vse& in, std::uint64_t addr,
                               TraceEvent& ev) {
  std::uint64_t c = FlushResident(ev);
  const std::uint64_t bytes = std::uint64_t{in.count} * 4;
  if (functional_) {
    const std::size_t lanes = vrfs_.size();
    std::vector<std::uint8_t> out(bytes);
    for (std::size_t i = 0; i < in.count; ++i) {
      const auto word = vrfs_[i % lanes].Read(in.vs, (i / lanes) * 4, 4);
      std::copy(word.begin(), word.end(), out.begin() + static_cast<std::ptrdiff_t>(i * 4));
    }
    mem_.Write(addr, out);
    ev.mem_write_bytes = bytes;
  }
  overlap_.Close();
  return c + cost_.Transfer(bytes * 8);
}

std::uint64_t Machine::FlushResident(TraceEvent& ev) {
  std::uint64_t c = 0;
  for (std::size_t l = 0; l < saus_.size(); ++l) {
    SauState& s = saus_[l];
    if (!s.resident_acc) continue;
    if (functional_) StoreGrid(static_cast<int>(l), *s.resident_acc, ev);
    c = std::max(c, DrainTile(s));
    s.resident_acc.reset();
  }
  return c;
}

void Machine::LoadGrid(int lane, int acc_reg) {
  SauState& s = saus_[static_cast<std::size_t>(lane)];
  const auto bytes = vrfs_[static_cast<std::size_t>(lane)].Read(
      acc_reg, 0, s.acc.size() * 4);
  for (std::size_t i = 0; i < s.acc.size(); ++i) {
    std::uint32_t w = 0;
    std::memcpy(&w, bytes.data() + i * 4, 4);
    s.acc[i] = static_cast<Accumulator>(w);
    s.acc_q.Push();
    s.acc_q.Pop();
  }
}

void Machine::StoreGrid(int lane, int acc_reg, TraceEvent& ev) {
  SauState& s = saus_[static_cast<std::size_t>(lane)];
  std::vector<std::uint8_t> bytes(s.acc.size() * 4);
  for (std::size_t i = 0; i < s.acc.size(); ++i) {
    const auto w = static_cast<std::uint32_t>(s.acc[i]);
    std::memcpy(bytes.data() + i * 4, &w, 4);
  }
  vrfs_[static_cast<std::size_t>(lane)].Write(acc_reg, 0, bytes);
  ev.vrf_write_bytes += bytes.size();
}

void Machine::GatherStreams(int lane, const VsaM& in, Precision p) {
  const Vrf& vrf = vrfs_[static_cast<std::size_t>(lane)];
  const std::size_t eb = static_cast<std::size_t>(ElementBits(p) / 8);
  const int e = ElemsPerReg();
  for (int r = 0; r < cfg_.tile_r; ++r) {
    OperandStream& row = rows_[static_cast<std::size_t>(r)];
    row.clear();
    for (int s = 0; s < in.steps; ++s) {
      const std::uint64_t idx = InputElementIndex(csr_.geometry, e, in.vs1, r, s);
      row.push_back(PackedElement::FromBytes(p, vrf.ReadFlat(idx * eb, eb)));
    }
  }
  for (int c = 0; c < cfg_.tile_c; ++c) {
    OperandStream& col = cols_[static_cast<std::size_t>(c)];
    col.clear();
    for (int s = 0; s < in.steps; ++s) {
      const std::uint64_t idx = WeightElementIndex(e, in.vs2, c, s, in.steps);
      col.push_back(PackedElement::FromBytes(p, vrf.ReadFlat(idx * eb, eb)));
    }
  }
}

std::uint64_t Machine::ExecVsaM(const VsaM& in, TraceEvent& ev) {
  const Precision p = RequirePrecision("VSAM");
  std::uint64_t c = 0;
  std::uint64_t tile = 0;
  if (csr_.dataflow == Dataflow::kFF) {
    c += FlushResident(ev);
    std::uint64_t drain = 0;
    for (int l = 0; l < cfg_.lanes; ++l) {
      SauState& s = saus_[static_cast<std::size_t>(l)];
      if (functional_) {
        LoadGrid(l, in.acc);
        GatherStreams(l, in, p);
        tile = std::max(tile, RunTile(rows_, cols_, in.steps, s));
        StoreGrid(l, in.acc, ev);
      } else {
        tile = cost_.Tile(in.steps);
      }
      drain = std::max(drain, DrainTile(s));
    }
    c += tile + drain;
  } else {
    for (int l = 0; l < cfg_.lanes; ++l) {
      SauState& s = saus_[static_cast<std::size_t>(l)];
      if (s.resident_acc != std::optional<int>(in.acc)) {
        if (s.resident_acc) {
          if (functional_) StoreGrid(l, *s.resident_acc, ev);
          // Lanes are in lockstep, so every lane pays the same drain.
          const std::uint64_t d = DrainTile(s);
          if (l == 0) c += d;
        }
        s.ClearGrid();
        s.resident_acc = in.acc;
      }
      if (functional_) {
        GatherStreams(l, in, p);
        tile = std::max(tile, RunTile(rows_, cols_, in.steps, s));
      } else {
        tile = cost_.Tile(in.steps);
      }
    }
    c += tile;
  }
  overlap_.AfterCompute(c);
  return c;
}

}  // namespace speed
