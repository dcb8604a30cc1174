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

#include <gtest/gtest.h>

#include <algorithm>

#include "speed/error.h"
#include "speed/isa.h"
#include "speed/timing.h"

namespace speed {
namespace {

LayerSpec Layer(int cin, int cout, int h, int w, int k, int stride = 1, int pad = 0,
                Precision p = Precision::kP16) {
  LayerSpec l;
  l.name = "t";
  l.cin = cin;
  l.cout = cout;
  l.h = h;
  l.w = w;
  l.k = k;
  l.stride = stride;
  l.pad = pad;
  l.precision = p;
  return l;
}

LayerSpec RandomLayer(Xorshift64Star& rng, Precision p) {
  static constexpr int kKs[] = {1, 3, 5, 7};
  LayerSpec l;
  l.name = "r";
  l.precision = p;
  l.k = kKs[rng.Uniform(0, 3)];
  l.stride = rng.Uniform(1, 2);
  l.pad = rng.Uniform(0, 1) ? l.k / 2 : 0;
  l.cin = rng.Uniform(1, 40);
  l.cout = rng.Uniform(1, 40);
  const int lo = std::max(1, l.k - 2 * l.pad);
  l.h = rng.Uniform(lo, 14);
  l.w = rng.Uniform(lo, 14);
  return l;
}

struct SimResult {
  std::vector<Accumulator> acc;
  Tensor out;
  std::uint64_t cycles = 0;
};

SimResult Simulate(const Schedule& s, const Tensor& in, const WeightTensor& w) {
  Machine m(s.cfg, StageMemory(s, in, w));
  ForEachIssue(s, [&](const Issue& is) { m.Execute(is); });
  return {ExtractAccumulators(s, m.memory()),
          ExtractOutput(s, m.memory(), DefaultShift(s.layer)), m.cycle()};
}

TEST(PackTest, P16IsIdentityGrouping) {
  const Tensor t = GenTensor(1, 3, 2, 2, Precision::kP16);
  const PackedGrid g = PackTensor(t, Precision::kP16);
  EXPECT_EQ(g.groups, 3);
  EXPECT_EQ(g.at(2, 1, 0).size(), 1);
  EXPECT_EQ(g.at(2, 1, 0)[0], t.at(2, 1, 0));
}

TEST(PackTest, P8PadsChannels) {
  const Tensor t = GenTensor(2, 6, 3, 3, Precision::kP8);
  const PackedGrid g = PackTensor(t, Precision::kP8);
  EXPECT_EQ(g.groups, 2);
  EXPECT_EQ(g.at(1, 2, 2)[1], t.at(5, 2, 2));
  EXPECT_EQ(g.at(1, 2, 2)[2], 0);
  EXPECT_EQ(g.at(1, 2, 2)[3], 0);
  EXPECT_EQ(UnpackTensor(g, 6), t);
}

TEST(PackTest, RoundTrip) {
  for (Precision p : kAllPrecisions) {
    const int cin = IcPar(p) * 3;
    const Tensor t = GenTensor(3, cin, 4, 5, p);
    EXPECT_EQ(UnpackTensor(PackTensor(t, p), cin), t);
  }
}

TEST(PlanFFTest, OverlapRegression) {
  MachineConfig cfg;
  cfg.tile_r = 2;
  const Schedule s = PlanFF(Layer(1, 16, 4, 4, 3), cfg);
  EXPECT_EQ(s.patch_h, 4);
  const auto stages = Stages(s);
  ASSERT_EQ(stages.size(), 2u);
  EXPECT_TRUE(stages[0].reuse_from_prev.empty());
  EXPECT_EQ(stages[1].reuse_elements, 8);
  // Only the one new column is loaded in the second stage.
  int input_loads = 0;
  for (const auto& ld : stages[1].prefetch) {
    if (ld.kind == LoadDesc::Kind::kInput) {
      ++input_loads;
      EXPECT_EQ(std::count(stages[1].reuse_from_prev.begin(), stages[1].reuse_from_prev.end(),
                           ld.vd),
                0);
    }
  }
  EXPECT_EQ(input_loads, 1);
  EXPECT_EQ(s.est_cycles, 116u);
}

TEST(PlanFFTest, PointwiseHasNoInputReuse) {
  const Schedule s = PlanFF(Layer(16, 16, 8, 8, 1), MachineConfig{});
  for (const auto& st : Stages(s)) EXPECT_EQ(st.reuse_elements, 0);
  EXPECT_EQ(s.input_load_bytes, s.no_reuse_input_load_bytes);
}

TEST(PlanFFTest, TwoChannelStagesAccumulate) {
  const Schedule s = PlanFF(Layer(2, 16, 4, 1, 1, 1, 0, Precision::kP16), MachineConfig{});
  EXPECT_EQ(s.groups, 2);
  const auto stages = Stages(s);
  ASSERT_EQ(stages.size(), 2u);
  // The first stage zeroes the partials, the second accumulates onto them.
  const auto zeroes = [](const Stage& st) {
    return std::any_of(st.prefetch.begin(), st.prefetch.end(),
                       [](const LoadDesc& l) { return l.kind == LoadDesc::Kind::kZero; });
  };
  EXPECT_TRUE(zeroes(stages[0]));
  EXPECT_FALSE(zeroes(stages[1]));
  EXPECT_EQ(stages[0].compute[0].acc, stages[1].compute[0].acc);
  EXPECT_FALSE(stages[0].writeback.has_value());
  EXPECT_TRUE(stages[1].writeback.has_value());
}

TEST(PlanCFTest, SingleWritebackPerTile) {
  const LayerSpec l = Layer(2 * IcPar(Precision::kP8), 16, 4, 4, 1, 1, 0, Precision::kP8);
  const Schedule cf = PlanCF(l, MachineConfig{});
  const Schedule ff = PlanFF(l, MachineConfig{});
  int cf_wb = 0, ff_wb = 0, ff_vsam = 0;
  for (const auto& st : Stages(cf)) cf_wb += st.writeback.has_value();
  for (const auto& st : Stages(ff)) {
    ff_wb += st.writeback.has_value();
    ff_vsam += static_cast<int>(st.compute.size());
  }
  const int tiles = cf.out_blocks * cf.bands * l.ow();
  EXPECT_EQ(cf_wb, tiles);
  EXPECT_EQ(ff_wb, tiles);
  // FF spills a partial-sum grid after each of its 2 channel stages.
  EXPECT_EQ(ff_vsam, 2 * tiles);
}

TEST(PlanCFTest, FootprintNotAboveFF) {
  Xorshift64Star rng(17);
  for (int i = 0; i < 60; ++i) {
    const LayerSpec l = RandomLayer(rng, kAllPrecisions[i % 3]);
    const Schedule ff = PlanFF(l, MachineConfig{});
    const Schedule cf = PlanCF(l, MachineConfig{});
    if (ff.groups >= 2) EXPECT_LE(cf.vrf_peak_bits, ff.vrf_peak_bits) << FormatLayerRecord(l);
  }
}

TEST(PlanTest, FootprintFitsVrf) {
  Xorshift64Star rng(23);
  const MachineConfig cfg;
  const std::uint64_t cap = static_cast<std::uint64_t>(cfg.slice_bits()) * cfg.num_vregs;
  for (int i = 0; i < 60; ++i) {
    const LayerSpec l = RandomLayer(rng, kAllPrecisions[i % 3]);
    for (Dataflow d : {Dataflow::kFF, Dataflow::kCF}) EXPECT_LE(Plan(l, cfg, d).vrf_peak_bits, cap);
  }
}

TEST(PlanTest, Infeasible) {
  MachineConfig cfg;
  cfg.vlen_bits = 256;  // 64-bit slices hold 4 elements at P16
  cfg.tile_r = 8;
  try {
    PlanFF(Layer(1, 16, 16, 16, 3), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
  }
}

TEST(LowerTest, SingleStagePointwiseShape) {
  const LayerSpec l = Layer(1, 16, 2, 1, 1);
  const auto mnemonics = [](const Schedule& s) {
    std::vector<std::string> out;
    for (const auto& is : Lower(s)) out.emplace_back(Mnemonic(is.instr));
    return out;
  };
  const Schedule cf = PlanCF(l, MachineConfig{});
  EXPECT_EQ(cf.stage_count, 1u);
  EXPECT_EQ(mnemonics(cf), (std::vector<std::string>{"vsacfg", "vsald", "vle", "vsetcfg",
                                                     "vsam", "vse"}));
  EXPECT_EQ(mnemonics(PlanFF(l, MachineConfig{})),
            (std::vector<std::string>{"vsacfg", "vle", "vsald", "vsald", "vsetcfg", "vsam",
                                      "vse"}));
}

TEST(LowerTest, InstructionCountLinearInStages) {
  for (Dataflow d : {Dataflow::kFF, Dataflow::kCF}) {
    std::vector<double> per_stage;
    std::uint64_t prev = 0;
    for (int w : {8, 16, 32, 64}) {
      const Schedule s = Plan(Layer(16, 16, 4, w, 1), MachineConfig{}, d);
      EXPECT_EQ(Lower(s).size(), s.instruction_count);
      EXPECT_GT(s.instruction_count, prev);
      prev = s.instruction_count;
      per_stage.push_back(static_cast<double>(s.instruction_count) / s.stage_count);
    }
    const auto [lo, hi] = std::minmax_element(per_stage.begin(), per_stage.end());
    EXPECT_LT(*hi / *lo, 1.1);
  }
}

TEST(LowerTest, ProgramCostMatchesEstimate) {
  Xorshift64Star rng(29);
  for (int i = 0; i < 40; ++i) {
    MachineConfig cfg;
    cfg.overlap_load_compute = i % 2;
    const LayerSpec l = RandomLayer(rng, kAllPrecisions[i % 3]);
    for (Dataflow d : {Dataflow::kFF, Dataflow::kCF}) {
      const Schedule s = Plan(l, cfg, d);
      TimingModel t(cfg);
      for (const auto& is : Lower(s)) t.Charge(is.instr);
      EXPECT_EQ(t.total(), s.est_cycles);
    }
  }
}

TEST(SelectStrategyTest, ArgminWithCfTies) {
  Xorshift64Star rng(31);
  for (int i = 0; i < 40; ++i) {
    const LayerSpec l = RandomLayer(rng, kAllPrecisions[i % 3]);
    const StrategyChoice c = SelectStrategy(l, MachineConfig{});
    ASSERT_TRUE(c.ff_cycles && c.cf_cycles);
    EXPECT_EQ(c.chosen, *c.cf_cycles <= *c.ff_cycles ? Dataflow::kCF : Dataflow::kFF);
    EXPECT_EQ(*c.ff_cycles, PlanFF(l, MachineConfig{}).est_cycles);
  }
}

TEST(SelectStrategyTest, OneSideInfeasible) {
  MachineConfig cfg;
  cfg.vlen_bits = 512;
  cfg.tile_r = 8;
  const LayerSpec l = Layer(1, 16, 16, 16, 3);
  EXPECT_THROW(PlanFF(l, cfg), Error);
  EXPECT_THROW(SelectStrategy(l, cfg), Error);
}

TEST(RequantizeTest, Examples) {
  EXPECT_EQ(Requantize(0, Precision::kP8, 7), 0);
  EXPECT_EQ(Requantize(300, Precision::kP8, 0), 127);
  EXPECT_EQ(Requantize(-4096, Precision::kP8, 4), -128);
}

TEST(DefaultShiftTest, GrowsWithReduction) {
  EXPECT_LT(DefaultShift(Layer(1, 1, 4, 4, 1)), DefaultShift(Layer(256, 1, 4, 4, 3)));
  EXPECT_LE(DefaultShift(Layer(4096, 1, 8, 8, 7)), 31u);
}

TEST(ExecuteTest, PointwiseFFAndCFAgree) {
  const LayerSpec l = Layer(1, 16, 5, 5, 1);
  const Tensor in = GenTensor(3, 1, 5, 5, Precision::kP16);
  const WeightTensor w = GenWeights(4, 16, 1, 1, Precision::kP16);
  const auto ff = Simulate(PlanFF(l, MachineConfig{}), in, w);
  const auto cf = Simulate(PlanCF(l, MachineConfig{}), in, w);
  EXPECT_EQ(ff.out, cf.out);
  EXPECT_EQ(ff.out, Conv2dRef(in, w, l, DefaultShift(l)));
}

// Both strategies, every precision: bit-exact against the oracle, and the
// simulated cycle count equals the planner estimate.
TEST(ExecutePropertyTest, OracleEquivalenceAndCycleAgreement) {
  Xorshift64Star rng(37);
  for (int i = 0; i < 30; ++i) {
    MachineConfig cfg;
    cfg.overlap_load_compute = i % 3 == 0;
    const LayerSpec l = RandomLayer(rng, kAllPrecisions[i % 3]);
    const Tensor in = GenTensor(100 + i, l.cin, l.h, l.w, l.precision);
    const WeightTensor w = GenWeights(200 + i, l.cout, l.cin, l.k, l.precision);
    const auto ref = Conv2dAcc(in, w, l);
    const Tensor ref_out = Conv2dRef(in, w, l, DefaultShift(l));
    for (Dataflow d : {Dataflow::kFF, Dataflow::kCF}) {
      const Schedule s = Plan(l, cfg, d);
      const auto r = Simulate(s, in, w);
      EXPECT_EQ(r.acc, ref) << FormatLayerRecord(l) << " " << DataflowName(d);
      EXPECT_EQ(r.out, ref_out);
      EXPECT_EQ(r.cycles, s.est_cycles);
    }
  }
}

TEST(ReusePropertyTest, OverlapIsLoadedOnce) {
  Xorshift64Star rng(41);
  int checked = 0;
  for (int i = 0; i < 80; ++i) {
    LayerSpec l = RandomLayer(rng, kAllPrecisions[i % 3]);
    if (l.k < 2 || l.stride >= l.k || l.ow() < 2) continue;
    const Schedule s = PlanFF(l, MachineConfig{});
    EXPECT_LT(s.input_load_bytes, s.no_reuse_input_load_bytes) << FormatLayerRecord(l);
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

// Registers listed as reused are never the destination of a load in that stage.
TEST(ReusePropertyTest, ReusedRegistersNotReloaded) {
  Xorshift64Star rng(43);
  for (int i = 0; i < 30; ++i) {
    const LayerSpec l = RandomLayer(rng, kAllPrecisions[i % 3]);
    for (Dataflow d : {Dataflow::kFF, Dataflow::kCF}) {
      ForEachStage(Plan(l, MachineConfig{}, d), [&](const Stage& st) {
        for (const auto& ld : st.prefetch) {
          ASSERT_EQ(std::count(st.reuse_from_prev.begin(), st.reuse_from_prev.end(), ld.vd), 0);
        }
      });
    }
  }
}

TEST(DumpScheduleTest, ListsStages) {
  const std::string text = DumpSchedule(PlanFF(Layer(1, 16, 4, 4, 3), MachineConfig{}), 1);
  EXPECT_NE(text.find("strategy ff"), std::string::npos);
  EXPECT_NE(text.find("stage 0:"), std::string::npos);
  EXPECT_EQ(text.find("stage 1:"), std::string::npos);
}

}  // namespace
}  // namespace speed
