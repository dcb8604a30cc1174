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

#include "speed/dataflow.h"

#include <algorithm>
#include <sstream>

#include "speed/error.h"
#include "speed/timing.h"

namespace speed {
namespace {

std::uint64_t CeilDiv(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }
std::uint64_t Align64(std::uint64_t a) { return (a + 63) / 64 * 64; }

[[noreturn]] void Infeasible(const LayerSpec& l, const std::string& why) {
  throw Error(ErrorCode::kInfeasible, "layer " + l.name + ": " + why);
}

int ZeroCount(const Schedule& s) {
  return static_cast<int>(CeilDiv(std::uint64_t(s.cfg.tile_r) * s.cfg.tile_c * 32,
                                  ElementBits(s.layer.precision)));
}

int EltBytes(const Schedule& s) { return ElementBits(s.layer.precision) / 8; }

int LanesTimesTileC(const Schedule& s) { return s.cfg.lanes * s.cfg.tile_c; }

// Channel groups in CF stage j.
int CfGroups(const Schedule& s, int j) {
  return std::min(s.stage_groups, s.groups - j * s.stage_groups);
}

// Geometry shared by both planners.
Schedule Prepare(const LayerSpec& layer, const MachineConfig& cfg, Dataflow d) {
  layer.Validate();
  cfg.Validate();
  Schedule s;
  s.layer = layer;
  s.cfg = cfg;
  s.strategy = d;
  s.tile_h = cfg.tile_r;
  const Precision p = layer.precision;
  const int eb = ElementBits(p);
  if (cfg.slice_bits() % eb != 0) Infeasible(layer, "register slice not a whole number of elements");
  s.elems_per_reg = cfg.slice_bits() / eb;
  s.groups = static_cast<int>(CeilDiv(layer.cin, IcPar(p)));
  s.patch_h = (cfg.tile_r - 1) * layer.stride + layer.k;
  s.out_blocks = static_cast<int>(CeilDiv(layer.cout, LanesTimesTileC(s)));
  s.bands = static_cast<int>(CeilDiv(layer.oh(), cfg.tile_r));
  if (s.patch_h > s.elems_per_reg) {
    Infeasible(layer, "patch of " + std::to_string(s.patch_h) +
                          " rows does not fit one register");
  }
  if (cfg.tile_r * cfg.tile_c * 32 > cfg.slice_bits()) {
    Infeasible(layer, "accumulator grid does not fit one register");
  }
  if (layer.k * layer.k > kMaxSteps) Infeasible(layer, "kernel too large for VSAM steps");
  if (layer.stride > kMaxRowPitch) Infeasible(layer, "stride exceeds row pitch field");
  if (cfg.lanes * s.elems_per_reg > kMaxCount) {
    Infeasible(layer, "one register of weights exceeds the load count field");
  }
  if (cfg.lanes * cfg.tile_r * cfg.tile_c > kMaxCount) {
    Infeasible(layer, "output tile exceeds the store count field");
  }
  return s;
}

std::uint64_t FfFootprint(const Schedule& s, int chunk_w) {
  const auto& l = s.layer;
  const std::uint64_t eb = ElementBits(l.precision);
  return std::uint64_t(s.cfg.tile_c) * l.k * l.k * eb +
         std::uint64_t((chunk_w - 1) * l.stride + l.k) * s.patch_h * eb +
         std::uint64_t(chunk_w) * s.cfg.tile_r * s.cfg.tile_c * 32;
}

std::uint64_t CfFootprint(const Schedule& s, int gs) {
  const auto& l = s.layer;
  const std::uint64_t eb = ElementBits(l.precision);
  return std::uint64_t(s.cfg.tile_c) * l.k * l.k * gs * eb +
         std::uint64_t(l.k) * s.patch_h * gs * eb +
         std::uint64_t(s.cfg.tile_r) * s.cfg.tile_c * 32;
}

int FfWeightRegs(const Schedule& s) {
  return static_cast<int>(CeilDiv(std::uint64_t(s.cfg.tile_c) * s.layer.k * s.layer.k,
                                  s.elems_per_reg));
}

int CfWeightRegs(const Schedule& s, int gs) {
  return static_cast<int>(CeilDiv(
      std::uint64_t(s.cfg.tile_c) * s.layer.k * s.layer.k * gs, s.elems_per_reg));
}

// Largest chunk width for FF, or 0 if even one column does not fit.
int FfChunkWidth(const Schedule& s, int weight_regs) {
  const auto& l = s.layer;
  int best = 0;
  for (int cw = 1; cw <= l.ow(); ++cw) {
    if (weight_regs + (cw - 1) * l.stride + l.k + cw <= s.cfg.num_vregs) best = cw;
  }
  return best;
}

void Layout(Schedule& s) {
  const auto& l = s.layer;
  const auto& cfg = s.cfg;
  const std::uint64_t eb8 = EltBytes(s);
  MemoryLayout& m = s.mem;
  m.padded_h = std::max(l.h + 2 * l.pad,
                        (s.bands - 1) * cfg.tile_r * l.stride + s.patch_h);
  m.padded_w = l.w + 2 * l.pad;
  m.zero_base = 0;
  m.zero_bytes = std::uint64_t(ZeroCount(s)) * eb8;
  m.input_base = Align64(m.zero_base + m.zero_bytes);
  m.input_bytes = std::uint64_t(s.groups) * m.padded_w * m.padded_h * eb8;
  m.weight_base = Align64(m.input_base + m.input_bytes);
  m.weight_bytes = std::uint64_t(s.out_blocks) * s.groups * cfg.lanes *
                   cfg.tile_c * l.k * l.k * eb8;
  m.output_base = Align64(m.weight_base + m.weight_bytes);
  m.output_bytes = std::uint64_t(s.out_blocks) * s.bands * l.ow() * cfg.lanes *
                   cfg.tile_r * cfg.tile_c * 4;
}

// Byte address of packed input element (g, y, x), padded coordinates.
std::uint64_t InputAddr(const Schedule& s, int g, int y, int x) {
  const MemoryLayout& m = s.mem;
  const std::uint64_t eb8 = EltBytes(s);
  if (s.strategy == Dataflow::kFF) {
    return m.input_base +
           ((std::uint64_t(g) * m.padded_w + x) * m.padded_h + y) * eb8;
  }
  const int j = g / s.stage_groups;
  const int gg = g % s.stage_groups;
  const std::uint64_t gs = CfGroups(s, j);
  const std::uint64_t block =
      std::uint64_t(j) * s.stage_groups * m.padded_w * m.padded_h;
  return m.input_base +
         (block + (std::uint64_t(x) * m.padded_h + y) * gs + gg) * eb8;
}

// Element index (within the weight region) of the first weight of output
// block b, channel group g.
std::uint64_t WeightBlockStart(const Schedule& s, int b, int g) {
  const std::uint64_t per_group =
      std::uint64_t(s.cfg.lanes) * s.cfg.tile_c * s.layer.k * s.layer.k;
  return per_group * (std::uint64_t(b) * s.groups + g);
}

// Per-lane weight slot of (c, kx, ky, gg) inside a stage holding gs groups.
std::uint64_t WeightSlot(const Schedule& s, int c, int kx, int ky, int gg, int gs) {
  const int k = s.layer.k;
  return ((std::uint64_t(c) * k + kx) * k + ky) * gs + gg;
}

std::uint64_t OutputAddr(const Schedule& s, int b, int band, int ox) {
  const std::uint64_t tile = std::uint64_t(s.cfg.lanes) * s.cfg.tile_r * s.cfg.tile_c;
  return s.mem.output_base +
         ((std::uint64_t(b) * s.bands + band) * s.layer.ow() + ox) * tile * 4;
}

void PushWeightLoads(const Schedule& s, Stage& st, std::uint64_t first_elem,
                     std::uint64_t total) {
  const std::uint64_t per_reg = std::uint64_t(s.cfg.lanes) * s.elems_per_reg;
  for (std::uint64_t i = 0; i * per_reg < total; ++i) {
    LoadDesc ld;
    ld.kind = LoadDesc::Kind::kWeight;
    ld.broadcast = false;
    ld.vd = static_cast<int>(i);
    ld.addr = s.mem.weight_base + (first_elem + i * per_reg) * EltBytes(s);
    ld.count = static_cast<int>(std::min(per_reg, total - i * per_reg));
    st.prefetch.push_back(ld);
  }
}

void ForEachStageFF(const Schedule& s, const std::function<void(const Stage&)>& fn) {
  const auto& l = s.layer;
  const auto& cfg = s.cfg;
  const int k = l.k;
  const int stride = l.stride;
  const int wr = s.weight_regs;
  const int col_base = wr;
  const int acc_base = wr + (s.chunk_w - 1) * stride + k;
  const std::uint64_t weights_per_group =
      std::uint64_t(cfg.lanes) * cfg.tile_c * k * k;
  const int tile_words = cfg.lanes * cfg.tile_r * cfg.tile_c;
  bool first = true;
  Stage st;
  for (int b = 0; b < s.out_blocks; ++b) {
    for (int band = 0; band < s.bands; ++band) {
      const int y0 = band * cfg.tile_r * stride;
      for (int ch = 0; ch < s.chunks; ++ch) {
        const int ox0 = ch * s.chunk_w;
        const int cw = std::min(s.chunk_w, l.ow() - ox0);
        const int x0 = ox0 * stride;
        for (int g = 0; g < s.groups; ++g) {
          int loaded_end = 0;
          for (int oxl = 0; oxl < cw; ++oxl) {
            st.Clear();
            const int acc = acc_base + oxl;
            if (oxl == 0) {
              PushWeightLoads(s, st, WeightBlockStart(s, b, g), weights_per_group);
            } else {
              for (int r = 0; r < wr; ++r) st.reuse_from_prev.push_back(r);
            }
            if (g == 0) {
              st.prefetch.push_back({LoadDesc::Kind::kZero, true, acc,
                                     s.mem.zero_base, ZeroCount(s)});
            }
            const int lo = oxl * stride;
            const int hi = lo + k;
            for (int i = lo; i < std::min(loaded_end, hi); ++i) {
              st.reuse_from_prev.push_back(col_base + i);
              st.reuse_elements += s.patch_h;
            }
            for (int i = std::max(lo, loaded_end); i < hi; ++i) {
              st.prefetch.push_back({LoadDesc::Kind::kInput, true, col_base + i,
                                     InputAddr(s, g, y0, x0 + i), s.patch_h});
            }
            loaded_end = hi;
            if (first) {
              st.geometry = StreamGeometry{stride, k};
              first = false;
            }
            st.compute.push_back({col_base + lo, 0, acc, k * k});
            if (g == s.groups - 1) {
              st.writeback = StoreDesc{acc, OutputAddr(s, b, band, ox0 + oxl), tile_words};
            }
            fn(st);
          }
        }
      }
    }
  }
}

void ForEachStageCF(const Schedule& s, const std::function<void(const Stage&)>& fn) {
  const auto& l = s.layer;
  const auto& cfg = s.cfg;
  const int k = l.k;
  const int stride = l.stride;
  const int in_base = CfWeightRegs(s, s.stage_groups);
  const int acc = in_base + k;
  const int tile_words = cfg.lanes * cfg.tile_r * cfg.tile_c;
  std::optional<StreamGeometry> current;
  Stage st;
  for (int b = 0; b < s.out_blocks; ++b) {
    for (int band = 0; band < s.bands; ++band) {
      const int y0 = band * cfg.tile_r * stride;
      for (int ox = 0; ox < l.ow(); ++ox) {
        for (int j = 0; j < s.channel_stages; ++j) {
          st.Clear();
          const int gs = CfGroups(s, j);
          const int g0 = j * s.stage_groups;
          for (int kx = 0; kx < k; ++kx) {
            st.prefetch.push_back({LoadDesc::Kind::kInput, true, in_base + kx,
                                   InputAddr(s, g0, y0, ox * stride + kx),
                                   s.patch_h * gs});
          }
          PushWeightLoads(s, st, WeightBlockStart(s, b, g0),
                          std::uint64_t(cfg.lanes) * cfg.tile_c * k * k * gs);
          const StreamGeometry geom{stride * gs, k * gs};
          if (current != geom) {
            st.geometry = geom;
            current = geom;
          }
          st.compute.push_back({in_base, 0, acc, k * k * gs});
          if (j == s.channel_stages - 1) {
            st.writeback = StoreDesc{acc, OutputAddr(s, b, band, ox), tile_words};
          }
          fn(st);
        }
      }
    }
  }
}

// Fills the estimate and traffic fields by walking the lowered stream.
void Summarize(Schedule& s) {
  TimingModel timing(s.cfg);
  const std::uint64_t eb8 = EltBytes(s);
  s.stage_count = 0;
  s.instruction_count = 0;
  ForEachStage(s, [&](const Stage& st) {
    ++s.stage_count;
    for (const auto& ld : st.prefetch) {
      const std::uint64_t bytes = std::uint64_t(ld.count) * eb8;
      if (ld.kind == LoadDesc::Kind::kInput) s.input_load_bytes += bytes;
      if (ld.kind == LoadDesc::Kind::kWeight) s.weight_load_bytes += bytes;
    }
    for (const auto& t : st.compute) {
      const std::uint64_t col_elems =
          std::uint64_t(s.patch_h) * (t.steps / (s.layer.k * s.layer.k));
      s.no_reuse_input_load_bytes += std::uint64_t(s.layer.k) * col_elems * eb8;
    }
    if (st.writeback) s.output_store_bytes += std::uint64_t(st.writeback->count) * 4;
  });
  ForEachIssue(s, [&](const Issue& is) {
    ++s.instruction_count;
    timing.Charge(is.instr);
  });
  s.est_cycles = timing.total();
}

}  // namespace

void Stage::Clear() {
  prefetch.clear();
  geometry.reset();
  compute.clear();
  writeback.reset();
  reuse_from_prev.clear();
  reuse_elements = 0;
}

PackedGrid PackTensor(const Tensor& t, Precision p) {
  PackedGrid g;
  g.precision = p;
  g.groups = static_cast<int>(CeilDiv(t.c, IcPar(p)));
  g.h = t.h;
  g.w = t.w;
  g.elements.reserve(static_cast<std::size_t>(g.groups) * t.h * t.w);
  std::vector<int> ops(static_cast<std::size_t>(IcPar(p)));
  for (int grp = 0; grp < g.groups; ++grp) {
    for (int y = 0; y < t.h; ++y) {
      for (int x = 0; x < t.w; ++x) {
        for (int i = 0; i < IcPar(p); ++i) {
          const int ch = grp * IcPar(p) + i;
          ops[static_cast<std::size_t>(i)] = ch < t.c ? t.at(ch, y, x) : 0;
        }
        g.elements.emplace_back(p, ops);
      }
    }
  }
  return g;
}

Tensor UnpackTensor(const PackedGrid& g, int cin) {
  Tensor t(cin, g.h, g.w, g.precision);
  for (int ch = 0; ch < cin; ++ch) {
    for (int y = 0; y < g.h; ++y) {
      for (int x = 0; x < g.w; ++x) {
        t.at(ch, y, x) = static_cast<std::int16_t>(
            g.at(ch / IcPar(g.precision), y, x)[ch % IcPar(g.precision)]);
      }
    }
  }
  return t;
}

Schedule PlanFF(const LayerSpec& layer, const MachineConfig& cfg) {
  Schedule s = Prepare(layer, cfg, Dataflow::kFF);
  s.weight_regs = FfWeightRegs(s);
  const int cw = FfChunkWidth(s, s.weight_regs);
  if (cw == 0) Infeasible(layer, "FF needs more vector registers than available");
  const int ow = layer.ow();
  s.chunks = static_cast<int>(CeilDiv(ow, cw));
  s.chunk_w = static_cast<int>(CeilDiv(ow, s.chunks));
  s.chunks = static_cast<int>(CeilDiv(ow, s.chunk_w));
  s.vrf_peak_bits = FfFootprint(s, s.chunk_w);
  Layout(s);
  Summarize(s);
  return s;
}

Schedule PlanCF(const LayerSpec& layer, const MachineConfig& cfg) {
  Schedule s = Prepare(layer, cfg, Dataflow::kCF);
  std::optional<std::uint64_t> ff_bits;
  {
    Schedule ff = s;
    const int cw = FfChunkWidth(ff, FfWeightRegs(ff));
    if (cw > 0) {
      const int chunks = static_cast<int>(CeilDiv(layer.ow(), cw));
      ff_bits = FfFootprint(ff, static_cast<int>(CeilDiv(layer.ow(), chunks)));
    }
  }
  const int k2 = layer.k * layer.k;
  auto fits = [&](int gs) {
    return s.patch_h * gs <= s.elems_per_reg && k2 * gs <= kMaxSteps &&
           CfWeightRegs(s, gs) + layer.k + 1 <= cfg.num_vregs;
  };
  if (!fits(1)) Infeasible(layer, "CF needs more vector registers than available");
  int best = 1;
  for (int gs = 2; gs <= s.groups && fits(gs); ++gs) {
    if (ff_bits && CfFootprint(s, gs) > *ff_bits) break;
    best = gs;
  }
  s.channel_stages = static_cast<int>(CeilDiv(s.groups, best));
  s.stage_groups = static_cast<int>(CeilDiv(s.groups, s.channel_stages));
  s.channel_stages = static_cast<int>(CeilDiv(s.groups, s.stage_groups));
  s.vrf_peak_bits = CfFootprint(s, s.stage_groups);
  Layout(s);
  Summarize(s);
  return s;
}

Schedule Plan(const LayerSpec& layer, const MachineConfig& cfg, Dataflow d) {
  return d == Dataflow::kFF ? PlanFF(layer, cfg) : PlanCF(layer, cfg);
}

void ForEachStage(const Schedule& s, const std::function<void(const Stage&)>& fn) {
  if (s.strategy == Dataflow::kFF) {
    ForEachStageFF(s, fn);
  } else {
    ForEachStageCF(s, fn);
  }
}

std::vector<Stage> Stages(const Schedule& s) {
  std::vector<Stage> out;
  ForEachStage(s, [&](const Stage& st) { out.push_back(st); });
  return out;
}

void ForEachIssue(const Schedule& s, const std::function<void(const Issue&)>& fn) {
  const auto base = static_cast<std::uint8_t>(kAddrReg);
  fn({VsaCfg{s.layer.precision, s.strategy}, 0});
  ForEachStage(s, [&](const Stage& st) {
    for (const auto& ld : st.prefetch) {
      const auto vd = static_cast<std::uint8_t>(ld.vd);
      const auto n = static_cast<std::uint16_t>(ld.count);
      if (ld.broadcast) {
        fn({VsaLd{vd, base, n}, ld.addr});
      } else {
        fn({Vle{vd, base, n}, ld.addr});
      }
    }
    if (st.geometry) {
      fn({VSetCfg{static_cast<std::uint16_t>(st.geometry->row_pitch),
                  static_cast<std::uint8_t>(st.geometry->run)},
          0});
    }
    for (const auto& t : st.compute) {
      fn({VsaM{static_cast<std::uint8_t>(t.vs1), static_cast<std::uint8_t>(t.vs2),
               static_cast<std::uint8_t>(t.acc), static_cast<std::uint16_t>(t.steps)},
          0});
    }
    if (st.writeback) {
      fn({Vse{static_cast<std::uint8_t>(st.writeback->vs), base,
              static_cast<std::uint16_t>(st.writeback->count)},
          st.writeback->addr});
    }
  });
}

std::vector<Issue> Lower(const Schedule& s) {
  std::vector<Issue> out;
  out.reserve(s.instruction_count);
  ForEachIssue(s, [&](const Issue& is) { out.push_back(is); });
  return out;
}

ExternalMemory StageMemory(const Schedule& s, const Tensor& input,
                           const WeightTensor& weights) {
  const auto& l = s.layer;
  const auto& cfg = s.cfg;
  if (input.c != l.cin || input.h != l.h || input.w != l.w ||
      weights.cout != l.cout || weights.cin != l.cin || weights.k != l.k) {
    throw Error(ErrorCode::kShapeMismatch, "tensors do not match layer " + l.name);
  }
  const Precision p = l.precision;
  const int icp = IcPar(p);
  const std::size_t eb8 = static_cast<std::size_t>(EltBytes(s));
  ExternalMemory mem(s.mem.total());
  auto bytes = mem.bytes();
  const PackedGrid grid = PackTensor(input, p);
  for (int g = 0; g < s.groups; ++g) {
    for (int y = 0; y < l.h; ++y) {
      for (int x = 0; x < l.w; ++x) {
        const std::uint64_t a = InputAddr(s, g, y + l.pad, x + l.pad);
        grid.at(g, y, x).ToBytes(bytes.subspan(a, eb8));
      }
    }
  }
  const int k = l.k;
  std::vector<int> ops(static_cast<std::size_t>(icp));
  for (int b = 0; b < s.out_blocks; ++b) {
    for (int g = 0; g < s.groups; ++g) {
      int gs = 1;
      int gg = 0;
      std::uint64_t start = WeightBlockStart(s, b, g);
      if (s.strategy == Dataflow::kCF) {
        const int j = g / s.stage_groups;
        gs = CfGroups(s, j);
        gg = g % s.stage_groups;
        start = WeightBlockStart(s, b, j * s.stage_groups);
      }
      for (int lane = 0; lane < cfg.lanes; ++lane) {
        for (int c = 0; c < cfg.tile_c; ++c) {
          const int o = (b * cfg.lanes + lane) * cfg.tile_c + c;
          if (o >= l.cout) continue;
          for (int kx = 0; kx < k; ++kx) {
            for (int ky = 0; ky < k; ++ky) {
              for (int i = 0; i < icp; ++i) {
                const int ch = g * icp + i;
                ops[static_cast<std::size_t>(i)] =
                    ch < l.cin ? weights.at(o, ch, ky, kx) : 0;
              }
              const std::uint64_t elem =
                  start + WeightSlot(s, c, kx, ky, gg, gs) * cfg.lanes + lane;
              PackedElement(p, ops).ToBytes(
                  bytes.subspan(s.mem.weight_base + elem * eb8, eb8));
            }
          }
        }
      }
    }
  }
  return mem;
}

std::vector<Accumulator> ExtractAccumulators(const Schedule& s,
                                             const ExternalMemory& mem) {
  const auto& l = s.layer;
  const auto& cfg = s.cfg;
  const int oh = l.oh();
  const int ow = l.ow();
  std::vector<Accumulator> out(static_cast<std::size_t>(l.cout) * oh * ow, 0);
  for (int b = 0; b < s.out_blocks; ++b) {
    for (int band = 0; band < s.bands; ++band) {
      for (int ox = 0; ox < ow; ++ox) {
        const std::uint64_t base = OutputAddr(s, b, band, ox);
        for (int lane = 0; lane < cfg.lanes; ++lane) {
          for (int r = 0; r < cfg.tile_r; ++r) {
            const int oy = band * cfg.tile_r + r;
            if (oy >= oh) continue;
            for (int c = 0; c < cfg.tile_c; ++c) {
              const int o = (b * cfg.lanes + lane) * cfg.tile_c + c;
              if (o >= l.cout) continue;
              const std::uint64_t word =
                  std::uint64_t(r * cfg.tile_c + c) * cfg.lanes + lane;
              out[(static_cast<std::size_t>(o) * oh + oy) * ow + ox] =
                  static_cast<Accumulator>(mem.ReadU32(base + word * 4));
            }
          }
        }
      }
    }
  }
  return out;
}

Tensor ExtractOutput(const Schedule& s, const ExternalMemory& mem,
                     unsigned shift) {
  const auto acc = ExtractAccumulators(s, mem);
  Tensor t(s.layer.cout, s.layer.oh(), s.layer.ow(), s.layer.precision);
  for (std::size_t i = 0; i < acc.size(); ++i) {
    t.values[i] = static_cast<std::int16_t>(Requantize(acc[i], s.layer.precision, shift));
  }
  return t;
}

StrategyChoice SelectStrategy(const LayerSpec& layer, const MachineConfig& cfg) {
  StrategyChoice c;
  std::optional<Error> ff_err;
  try {
    c.ff_cycles = PlanFF(layer, cfg).est_cycles;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInfeasible) throw;
    ff_err = e;
  }
  try {
    c.cf_cycles = PlanCF(layer, cfg).est_cycles;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInfeasible) throw;
    if (ff_err) throw;
  }
  c.chosen = (c.ff_cycles && (!c.cf_cycles || *c.ff_cycles < *c.cf_cycles))
                 ? Dataflow::kFF
                 : Dataflow::kCF;
  return c;
}

std::string DumpSchedule(const Schedule& s, std::uint64_t max_stages) {
  std::ostringstream out;
  const auto& l = s.layer;
  out << "layer " << FormatLayerRecord(l) << "\n"
      << "strategy " << DataflowName(s.strategy) << " tile_h=" << s.tile_h
      << " patch_h=" << s.patch_h << " groups=" << s.groups
      << " blocks=" << s.out_blocks << " bands=" << s.bands;
  if (s.strategy == Dataflow::kFF) {
    out << " weight_regs=" << s.weight_regs << " chunk_w=" << s.chunk_w
        << " chunks=" << s.chunks;
  } else {
    out << " stage_groups=" << s.stage_groups
        << " channel_stages=" << s.channel_stages;
  }
  out << "\nest_cycles " << s.est_cycles << " vrf_peak_bits " << s.vrf_peak_bits
      << " stages " << s.stage_count << " instructions " << s.instruction_count
      << "\n";
  std::uint64_t n = 0;
  ForEachStage(s, [&](const Stage& st) {
    if (n++ >= max_stages) return;
    out << "stage " << n - 1 << ":";
    for (const auto& ld : st.prefetch) {
      const char* kind = ld.kind == LoadDesc::Kind::kInput    ? "in"
                         : ld.kind == LoadDesc::Kind::kWeight ? "w"
                                                              : "zero";
      out << " " << (ld.broadcast ? "vsald" : "vle") << "(" << kind << " v"
          << ld.vd << " @" << ld.addr << " n" << ld.count << ")";
    }
    if (st.geometry) {
      out << " vsetcfg(" << st.geometry->row_pitch << "," << st.geometry->run << ")";
    }
    for (const auto& t : st.compute) {
      out << " vsam(v" << t.vs1 << ",v" << t.vs2 << ",v" << t.acc << "," << t.steps << ")";
    }
    if (st.writeback) {
      out << " vse(v" << st.writeback->vs << " @" << st.writeback->addr << " n"
          << st.writeback->count << ")";
    }
    if (!st.reuse_from_prev.empty()) {
      out << " reuse{";
      for (std::size_t i = 0; i < st.reuse_from_prev.size(); ++i) {
        out << (i ? "," : "") << "v" << st.reuse_from_prev[i];
      }
      out << "}";
    }
    out << "\n";
  });
  if (n > max_stages) out << "... " << (n - max_stages) << " more stages\n";
  return out.str();
}

}  // namespace speed
