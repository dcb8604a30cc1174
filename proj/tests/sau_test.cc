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

#include <gtest/gtest.h>

#include <random>

#include "speed/error.h"

namespace speed {
namespace {

PackedElement Elem(Precision p, std::vector<int> ops) { return PackedElement(p, ops); }

PackedElement RandomElem(std::mt19937& rng, Precision p) {
  std::uniform_int_distribution<int> d(OperandMin(p), OperandMax(p));
  std::vector<int> ops(static_cast<std::size_t>(IcPar(p)));
  for (auto& o : ops) o = d(rng);
  return PackedElement(p, ops);
}

TEST(PeDotTest, Examples) {
  EXPECT_EQ(PeDot(Elem(Precision::kP16, {3}), Elem(Precision::kP16, {5}), 0), 15);
  const std::vector<int> ones(16, 1);
  EXPECT_EQ(PeDot(Elem(Precision::kP4, ones), Elem(Precision::kP4, ones), 0), 16);
  EXPECT_EQ(PeDot(Elem(Precision::kP8, {-128, 127, 1, 0}),
                  Elem(Precision::kP8, {127, -128, -1, 5}), 10),
            -32503);
}

TEST(PeDotTest, PrecisionMismatch) {
  try {
    PeDot(Elem(Precision::kP16, {1}), Elem(Precision::kP8, {1, 1, 1, 1}), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecisionMismatch);
  }
}

TEST(PeDotTest, WrapsAt32Bits) {
  const auto a = Elem(Precision::kP16, {-32768});
  EXPECT_EQ(PeDot(a, a, 2147483647), static_cast<Accumulator>(2147483647u + 1073741824u));
}

TEST(PackedElementTest, Validation) {
  EXPECT_THROW(Elem(Precision::kP8, {1, 2, 3}), Error);
  EXPECT_THROW(Elem(Precision::kP4, std::vector<int>(16, 8)), Error);
  EXPECT_NO_THROW(Elem(Precision::kP4, std::vector<int>(16, -8)));
}

TEST(PackedElementTest, ByteRoundTrip) {
  std::mt19937 rng(3);
  for (Precision p : kAllPrecisions) {
    for (int i = 0; i < 200; ++i) {
      const PackedElement e = RandomElem(rng, p);
      std::vector<std::uint8_t> bytes(static_cast<std::size_t>(ElementBits(p) / 8));
      e.ToBytes(bytes);
      EXPECT_EQ(PackedElement::FromBytes(p, bytes), e);
    }
  }
}

TEST(PackedElementTest, NibbleLayout) {
  std::vector<int> ops(16, 0);
  ops[0] = -1;
  ops[1] = 2;
  std::vector<std::uint8_t> bytes(8);
  Elem(Precision::kP4, ops).ToBytes(bytes);
  EXPECT_EQ(bytes[0], 0x2f);
}

TEST(RunTileTest, UnitTile) {
  SauState s(1, 1, 8);
  const std::vector<OperandStream> rows = {{Elem(Precision::kP16, {2})}};
  const std::vector<OperandStream> cols = {{Elem(Precision::kP16, {7})}};
  EXPECT_EQ(RunTile(rows, cols, 1, s), 2u);
  EXPECT_EQ(s.at(0, 0), 14);
}

TEST(RunTileTest, ZeroSteps) {
  SauState s(1, 1, 8);
  s.at(0, 0) = 5;
  const std::vector<OperandStream> rows(1), cols(1);
  EXPECT_EQ(RunTile(rows, cols, 0, s), 0u);
  EXPECT_EQ(s.at(0, 0), 5);
}

TEST(RunTileTest, KernelSweepOnFourByFour) {
  SauState s(4, 4, 8);
  const std::vector<OperandStream> rows(4, OperandStream(9, Elem(Precision::kP16, {1})));
  const std::vector<OperandStream> cols(4, OperandStream(9, Elem(Precision::kP16, {1})));
  EXPECT_EQ(RunTile(rows, cols, 9, s), 16u);
  EXPECT_EQ(s.at(3, 3), 9);
}

TEST(RunTileTest, Underrun) {
  SauState s(2, 2, 8);
  const std::vector<OperandStream> rows(2, OperandStream(3, Elem(Precision::kP16, {1})));
  std::vector<OperandStream> cols(2, OperandStream(3, Elem(Precision::kP16, {1})));
  cols[1].pop_back();
  try {
    RunTile(rows, cols, 3, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStreamUnderrun);
  }
}

// Random streams against a triple loop with explicit 32-bit wrap.
TEST(RunTilePropertyTest, MatchesNaiveAccumulation) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const Precision p = kAllPrecisions[trial % 3];
    const int tr = 1 + trial % 5;
    const int tc = 1 + (trial / 5) % 4;
    const int steps = 1 + trial % 23;
    SauState s(tr, tc, 1 + trial % 8);
    std::vector<OperandStream> rows(static_cast<std::size_t>(tr));
    std::vector<OperandStream> cols(static_cast<std::size_t>(tc));
    for (auto& r : rows) for (int i = 0; i < steps; ++i) r.push_back(RandomElem(rng, p));
    for (auto& c : cols) for (int i = 0; i < steps; ++i) c.push_back(RandomElem(rng, p));
    const std::uint64_t cycles = RunTile(rows, cols, steps, s);
    EXPECT_EQ(cycles, static_cast<std::uint64_t>(tr + tc - 1 + steps));
    for (int r = 0; r < tr; ++r) {
      for (int c = 0; c < tc; ++c) {
        std::uint32_t want = 0;
        for (int st = 0; st < steps; ++st) {
          for (int i = 0; i < IcPar(p); ++i) {
            want += static_cast<std::uint32_t>(
                rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(st)][i] *
                cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(st)][i]);
          }
        }
        EXPECT_EQ(s.at(r, c), static_cast<Accumulator>(want));
      }
    }
  }
}

// A fused 8-bit dot product equals the sum of its exact operand products.
TEST(PeDotPropertyTest, FusionEqualsSumOfProducts) {
  std::mt19937 rng(5);
  for (Precision p : {Precision::kP4, Precision::kP8}) {
    for (int i = 0; i < 500; ++i) {
      const auto a = RandomElem(rng, p);
      const auto w = RandomElem(rng, p);
      Accumulator acc = 0;
      for (int j = 0; j < a.size(); ++j) {
        acc = PeDot(PackedElement(Precision::kP16, std::vector<int>{a[j]}),
                    PackedElement(Precision::kP16, std::vector<int>{w[j]}), acc);
      }
      EXPECT_EQ(PeDot(a, w, 0), acc);
    }
  }
}

TEST(QueueTest, ConservationAndBackpressure) {
  SauState s(4, 4, 3);
  const std::vector<OperandStream> rows(4, OperandStream(10, Elem(Precision::kP8, {1, 1, 1, 1})));
  const std::vector<OperandStream> cols(4, OperandStream(10, Elem(Precision::kP8, {1, 1, 1, 1})));
  RunTile(rows, cols, 10, s);
  DrainTile(s);
  for (const QueueModel* q : {&s.input_q, &s.weight_q, &s.output_q}) {
    EXPECT_EQ(q->pushed(), q->popped() + static_cast<std::uint64_t>(q->occupancy()));
    EXPECT_LE(q->peak(), q->depth());
  }
  EXPECT_EQ(s.input_q.pushed(), 40u);
  EXPECT_EQ(s.output_q.pushed(), 16u);
  EXPECT_GT(s.input_q.stalls(), 0u);
}

TEST(RequestOperandsTest, FixedPriority) {
  OperandDemand d;
  d.weights = {100};
  d.inputs = {200};
  const auto reqs = RequestOperands(d);
  ASSERT_EQ(reqs.size(), 2u);
  EXPECT_EQ(reqs[0], (OperandRequest{0, OperandClass::kWeight, 100}));
  EXPECT_EQ(reqs[1], (OperandRequest{1, OperandClass::kInput, 200}));
  d.accumulators = {7};
  EXPECT_EQ(RequestOperands(d)[0].kind, OperandClass::kAccumulator);
}

TEST(RequestOperandsTest, NoDemandNoRequests) {
  EXPECT_TRUE(RequestOperands(OperandDemand{}).empty());
}

TEST(RequestOperandsTest, TileRequestCount) {
  for (int steps : {1, 9, 25}) {
    const auto d = TileDemand({1, 3}, 64, 4, 0, steps, 4, 4);
    const auto reqs = RequestOperands(d);
    EXPECT_EQ(reqs.size(), static_cast<std::size_t>(steps * (4 + 4)));
    EXPECT_EQ(reqs.back().cycle + 1, reqs.size());
    const auto two = RequestOperands(d, 2);
    EXPECT_EQ(two.back().cycle + 1, (reqs.size() + 1) / 2);
  }
}

TEST(AddressGeneratorTest, RunAdvancesRegister) {
  const StreamGeometry g{2, 3};
  EXPECT_EQ(InputElementIndex(g, 64, 5, 0, 0), 5u * 64);
  EXPECT_EQ(InputElementIndex(g, 64, 5, 0, 2), 5u * 64 + 2);
  EXPECT_EQ(InputElementIndex(g, 64, 5, 0, 3), 6u * 64);
  EXPECT_EQ(InputElementIndex(g, 64, 5, 3, 4), 6u * 64 + 6 + 1);
  EXPECT_EQ(InputElementIndex({1, 0}, 64, 5, 2, 70), 5u * 64 + 72);
  EXPECT_EQ(WeightElementIndex(64, 0, 2, 4, 9), 22u);
}

TEST(ParallelismTest, Dims) {
  MachineConfig cfg;
  const auto p4 = GetParallelismDims(cfg, Precision::kP4);
  EXPECT_EQ(p4.ic, 16);
  EXPECT_EQ(p4.oc, 4);
  EXPECT_EQ(p4.fh, 4);
  EXPECT_EQ(p4.macs_per_cycle(), 256);
  EXPECT_EQ(GetParallelismDims(cfg, Precision::kP16).macs_per_cycle(), 16);
  cfg.tile_r = cfg.tile_c = 1;
  const auto p8 = GetParallelismDims(cfg, Precision::kP8);
  EXPECT_EQ(p8.ic, 4);
  EXPECT_EQ(p8.macs_per_cycle(), 4);
}

TEST(ParallelismTest, ThroughputRatio) {
  MachineConfig cfg;
  const int p4 = GetParallelismDims(cfg, Precision::kP4).macs_per_cycle();
  const int p8 = GetParallelismDims(cfg, Precision::kP8).macs_per_cycle();
  const int p16 = GetParallelismDims(cfg, Precision::kP16).macs_per_cycle();
  EXPECT_EQ(p4 / p16, 16);
  EXPECT_EQ(p8 / p16, 4);
}

}  // namespace
}  // namespace speed
