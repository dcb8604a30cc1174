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

#include "speed/report.h"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "speed/models.h"

namespace speed {
namespace {

namespace fs = std::filesystem;

const fs::path kGoldenDir = fs::path(SPEED_SOURCE_DIR) / "tests" / "golden";

std::vector<LayerSpec> SmallLayers() {
  return ParseLayerFile(
      "name=a cin=8 cout=16 h=6 w=6 k=3 stride=1 pad=1\n"
      "name=b cin=16 cout=8 h=6 w=6 k=1\n"
      "name=c cin=8 cout=12 h=6 w=5 k=5 stride=2 pad=2\n"
      "name=d cin=5 cout=4 h=7 w=7 k=7\n");
}

std::vector<LayerSpec> WithPrecision(std::vector<LayerSpec> layers, Precision p) {
  for (auto& l : layers) l.precision = p;
  return layers;
}

void ExpectGolden(const std::string& name, const std::string& got) {
  const fs::path path = kGoldenDir / name;
  if (std::getenv("SPEED_UPDATE_GOLDEN")) {
    std::ofstream(path, std::ios::binary) << got;
  }
  std::ifstream in(path, std::ios::binary);
  ASSERT_TRUE(in) << "missing golden file " << path;
  std::stringstream want;
  want << in.rdbuf();
  EXPECT_EQ(got, want.str()) << name;
}

std::size_t Columns(const std::string& line) {
  return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

TEST(PeakTest, Examples) {
  MachineConfig cfg;
  EXPECT_DOUBLE_EQ(TheoreticalPeakGops(cfg, Precision::kP4), 1024.0);
  EXPECT_DOUBLE_EQ(TheoreticalPeakGops(cfg, Precision::kP16), 64.0);
  EXPECT_DOUBLE_EQ(TheoreticalPeakOpsPerCycle(cfg, Precision::kP8), 512.0);
  const double full = TheoreticalPeakGops(cfg, Precision::kP8);
  cfg.lanes = 2;
  EXPECT_DOUBLE_EQ(TheoreticalPeakGops(cfg, Precision::kP8), full / 2);
}

TEST(StrategyTest, Parse) {
  EXPECT_EQ(ParseStrategy("mixed"), Strategy::kMixed);
  EXPECT_EQ(StrategyName(ParseStrategy("ff")), "ff");
  EXPECT_THROW(ParseStrategy("both"), Error);
}

TEST(RunLayerTest, PointwiseMixedPicksCF) {
  const auto l = ParseLayerRecord("name=p cin=64 cout=64 h=14 w=14 k=1");
  const LayerRecord r = RunLayer(l, MachineConfig{}, Strategy::kMixed);
  EXPECT_EQ(r.strategy, Dataflow::kCF);
  EXPECT_EQ(r.cycles_used, *r.cycles_cf);
  EXPECT_LE(r.cycles_used, *r.cycles_ff);
}

TEST(RunLayerTest, ForcedStrategy) {
  const auto l = ParseLayerRecord("name=p cin=64 cout=64 h=14 w=14 k=1");
  const LayerRecord r = RunLayer(l, MachineConfig{}, Strategy::kFF);
  EXPECT_EQ(r.strategy, Dataflow::kFF);
  EXPECT_EQ(r.cycles_used, *r.cycles_ff);
}

TEST(RunLayerTest, VerifiesBenchmarkLayersAtP8) {
  // Cropped copies of benchmark layers keep the functional run short.
  for (auto name : kModelNames) {
    const auto layers = ModelLayers(name, Precision::kP8).layers;
    for (std::size_t i = 0; i < layers.size(); i += 9) {
      LayerSpec l = layers[i];
      l.h = std::min(l.h, 2 * l.k);
      l.w = std::min(l.w, 2 * l.k);
      l.cout = std::min(l.cout, 32);
      const LayerRecord r = RunLayer(l, MachineConfig{}, Strategy::kMixed, {true, 5});
      EXPECT_TRUE(r.verified) << name << " " << l.name;
    }
  }
}

TEST(RunLayersTest, ErrorsCarryLayerName) {
  LayerSpec bad = ParseLayerRecord("name=huge cin=1 cout=4 h=64 w=64 k=3");
  MachineConfig cfg;
  cfg.vlen_bits = 256;
  cfg.tile_r = 8;
  try {
    RunLayers("m", {bad}, cfg, Strategy::kMixed);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
    EXPECT_NE(std::string(e.what()).find("huge"), std::string::npos);
  }
}

TEST(ReportTest, SelfConsistent) {
  const MachineConfig cfg;
  for (Precision p : kAllPrecisions) {
    const CycleReport r = RunModel("SqueezeNet", cfg, Strategy::kMixed, p);
    std::uint64_t cycles = 0, macs = 0;
    double best = 0;
    for (const auto& l : r.layers) {
      EXPECT_NEAR(l.op_per_cycle, 2.0 * l.macs / l.cycles_used, 1e-9);
      EXPECT_NEAR(l.utilization, l.op_per_cycle / TheoreticalPeakOpsPerCycle(cfg, p), 1e-12);
      EXPECT_NEAR(l.gops, l.op_per_cycle * cfg.freq_mhz * 1e-3, 1e-9);
      EXPECT_GE(l.utilization, 0.0);
      EXPECT_LE(l.utilization, 1.0);
      EXPECT_EQ(l.cycles_used, std::min(*l.cycles_ff, *l.cycles_cf));
      EXPECT_FALSE(l.gops_per_mm2.has_value());
      cycles += l.cycles_used;
      macs += l.macs;
      best = std::max(best, l.gops);
    }
    EXPECT_EQ(r.aggregate.total_cycles, cycles);
    EXPECT_EQ(r.aggregate.total_macs, macs);
    EXPECT_DOUBLE_EQ(r.aggregate.peak_gops, best);
    EXPECT_LE(r.aggregate.peak_gops, r.aggregate.theoretical_peak_gops);
  }
}

TEST(ReportTest, AreaColumnOnlyWhenSupplied) {
  MachineConfig cfg;
  cfg.area_mm2 = 2.0;
  const auto r = RunLayer(ParseLayerRecord("name=p cin=16 cout=16 h=4 w=4 k=3 pad=1"), cfg,
                          Strategy::kMixed);
  ASSERT_TRUE(r.gops_per_mm2.has_value());
  EXPECT_DOUBLE_EQ(*r.gops_per_mm2, r.gops / 2.0);
}

TEST(ReportTest, ByteStable) {
  const auto layers = WithPrecision(SmallLayers(), Precision::kP8);
  const auto a = RunLayers("small", layers, MachineConfig{}, Strategy::kMixed, {true, 3});
  const auto b = RunLayers("small", layers, MachineConfig{}, Strategy::kMixed, {true, 3});
  EXPECT_EQ(ReportJson(a), ReportJson(b));
  EXPECT_EQ(ReportCsv(a), ReportCsv(b));
}

TEST(ReportTest, GoldenLayerReports) {
  const auto layers = WithPrecision(SmallLayers(), Precision::kP8);
  const auto r = RunLayers("small", layers, MachineConfig{}, Strategy::kMixed, {true, 3});
  ExpectGolden("small_p8.json", ReportJson(r));
  ExpectGolden("small_p8.csv", ReportCsv(r));
}

TEST(ReportTest, GoldenComparison) {
  const auto c = CompareStrategies("SqueezeNet", MachineConfig{}, Precision::kP16);
  ExpectGolden("squeezenet_p16_comparison.json", ComparisonJson(c));
  ExpectGolden("squeezenet_p16_comparison.csv", ComparisonCsv(c));
  EXPECT_LE(c.mixed.aggregate.total_cycles, c.ff.aggregate.total_cycles);
  EXPECT_LE(c.mixed.aggregate.total_cycles, c.cf.aggregate.total_cycles);
}

TEST(ReportTest, CsvShape) {
  const auto r = RunLayers("small", SmallLayers(), MachineConfig{},
                           Strategy::kMixed);
  std::istringstream in(ReportCsv(r));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line,
            "model,layer,cin,cout,h,w,k,stride,pad,precision,strategy,cycles_ff,cycles_cf,"
            "cycles_used,macs,op_per_cycle,utilization,gops,gops_per_mm2,verified");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(Columns(line), 20u);
    ++rows;
  }
  EXPECT_EQ(rows, 4);
}

TEST(ModelReportTest, PeakFallsWithPrecision) {
  for (auto name : kModelNames) {
    double prev = 1e300;
    for (Precision p : {Precision::kP4, Precision::kP8, Precision::kP16}) {
      const double peak = RunModel(name, MachineConfig{}, Strategy::kMixed, p).aggregate.peak_gops;
      EXPECT_LT(peak, prev) << name << " " << PrecisionName(p);
      prev = peak;
    }
  }
}

TEST(SweepTest, SingleCellMatchesRunModel) {
  const MachineConfig cfg;
  const auto rows = Sweep(cfg, {{4}, {4}, {4}, {Precision::kP8}}, "SqueezeNet", Strategy::kMixed);
  ASSERT_EQ(rows.size(), 1u);
  ASSERT_TRUE(rows[0].aggregate.has_value());
  const auto want = RunModel("SqueezeNet", cfg, Strategy::kMixed, Precision::kP8).aggregate;
  EXPECT_EQ(rows[0].aggregate->total_cycles, want.total_cycles);
  EXPECT_DOUBLE_EQ(rows[0].aggregate->op_per_cycle, want.op_per_cycle);
  EXPECT_DOUBLE_EQ(rows[0].aggregate->peak_gops, want.peak_gops);
}

TEST(SweepTest, MoreLanesNeverSlower) {
  const auto rows =
      Sweep(MachineConfig{}, {{1, 2, 4, 8}, {4}, {4}, {Precision::kP8, Precision::kP16}},
            "ResNet18", Strategy::kMixed);
  ASSERT_EQ(rows.size(), 8u);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const auto& a = rows[i];
    const auto& b = rows[i + 1];
    if (a.precision != b.precision || !a.aggregate || !b.aggregate) continue;
    EXPECT_EQ(b.lanes, 2 * a.lanes);
    EXPECT_LE(b.aggregate->total_cycles, a.aggregate->total_cycles) << b.lanes;
  }
}

TEST(SweepTest, CellErrorsRecorded) {
  MachineConfig base;
  base.vlen_bits = 512;
  const auto rows = Sweep(base, {{4}, {16}, {4}, {Precision::kP16}}, "VGG16", Strategy::kMixed);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].aggregate.has_value());
  EXPECT_FALSE(rows[0].error.empty());
  std::istringstream in(SweepCsv(rows));
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(Columns(header), 12u);
  EXPECT_EQ(Columns(row), 12u);
  EXPECT_THROW(Sweep(base, {{4}, {4}, {4}, {Precision::kP16}}, "LeNet", Strategy::kMixed), Error);
}

TEST(ExitCodeTest, Mapping) {
  EXPECT_EQ(ExitCodeFor(ErrorCode::kVerificationFailed), 1);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kInfeasible), 2);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kConfigError), 2);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kUnknownModel), 2);
}

int RunCli(const std::string& args) {
  const std::string cmd = std::string(SPEEDSIM_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, ExitCodes) {
  EXPECT_EQ(RunCli("run-layer --layer 'name=x cin=8 cout=8 h=6 w=6 k=3 pad=1' --verify"), 0);
  EXPECT_EQ(RunCli("verify --layer 'name=x cin=4 cout=4 h=5 w=5 k=1' --precision 4"), 0);
  EXPECT_EQ(RunCli("run-model LeNet"), 2);
  EXPECT_EQ(RunCli("run-model VGG16 --precision 12"), 2);
  EXPECT_EQ(RunCli("run-layer --layer 'name=x cin=8 cout=8 h=6 w=6 k=3' --strategy fast"), 2);
  EXPECT_EQ(RunCli("run-layer --layer 'name=x cin=8 cout=8 h=2 w=2 k=3'"), 2);
  EXPECT_EQ(RunCli("disasm /nonexistent/prog.hex"), 2);
  EXPECT_EQ(RunCli("no-such-command"), 2);
}

TEST(CliTest, AsmDisasmRoundTrip) {
  const fs::path dir = fs::temp_directory_path();
  const fs::path src = dir / "speed_cli_prog.s";
  const fs::path bin = dir / "speed_cli_prog.bin";
  std::ofstream(src) << "vsacfg e8, cf\nvsald v1, x10, 64\nvsam v1, v2, v3, 9\n";
  ASSERT_EQ(RunCli("asm " + src.string() + " -o " + bin.string()), 0);
  const std::string cmd = std::string(SPEEDSIM_PATH) + " disasm --binary " + bin.string();
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string out;
  char buf[256];
  while (fgets(buf, sizeof(buf), pipe)) out += buf;
  EXPECT_EQ(pclose(pipe), 0);
  EXPECT_NE(out.find("vsam v1, v2, v3, 9"), std::string::npos) << out;
  fs::remove(src);
  fs::remove(bin);
}

}  // namespace
}  // namespace speed
