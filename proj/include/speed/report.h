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

#ifndef SPEED_REPORT_H_
#define SPEED_REPORT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "speed/config.h"
#include "speed/error.h"
#include "speed/dataflow.h"
#include "speed/isa.h"
#include "speed/layer.h"

namespace speed {

enum class Strategy : std::uint8_t { kFF, kCF, kMixed };

Strategy ParseStrategy(std::string_view text);  // "ff", "cf", "mixed"
std::string_view StrategyName(Strategy s);

// 2 * lanes * tile_r * tile_c * ic_par * freq_mhz * 1e-3.
double TheoreticalPeakGops(const MachineConfig& cfg, Precision p);
double TheoreticalPeakOpsPerCycle(const MachineConfig& cfg, Precision p);

struct RunOptions {
  // Run the functional simulator on generated tensors and compare with the
  // reference convolution. Otherwise only timing is simulated.
  bool verify = false;
  std::uint64_t seed = 1;
};

struct LayerRecord {
  std::string name;
  int cin = 0;
  int cout = 0;
  int h = 0;
  int w = 0;
  int k = 0;
  int stride = 0;
  int pad = 0;
  Precision precision = Precision::kP16;
  Dataflow strategy = Dataflow::kCF;
  std::optional<std::uint64_t> cycles_ff;  // empty when infeasible
  std::optional<std::uint64_t> cycles_cf;
  std::uint64_t cycles_used = 0;  // simulated
  std::uint64_t macs = 0;
  double op_per_cycle = 0;
  double utilization = 0;
  double gops = 0;
  std::optional<double> gops_per_mm2;  // only with a user-supplied area
  bool verified = false;
};

struct Aggregate {
  std::uint64_t total_cycles = 0;
  std::uint64_t total_macs = 0;
  double op_per_cycle = 0;       // 2 * total_macs / total_cycles
  double mean_op_per_cycle = 0;  // mean over layers
  double gops = 0;               // op_per_cycle at the configured clock
  double peak_gops = 0;          // best layer
  double theoretical_peak_gops = 0;
};

struct CycleReport {
  std::string model;
  Precision precision = Precision::kP16;
  Strategy strategy = Strategy::kMixed;
  MachineConfig config;
  std::vector<LayerRecord> layers;
  Aggregate aggregate;
};

// Plans with the requested strategy (mixed picks the cheaper estimate),
// simulates, and checks simulated cycles against the estimate. Throws
// Error(kVerificationFailed) on an output or cycle mismatch, Error(kInfeasible)
// if the requested strategy cannot be planned.
LayerRecord RunLayer(const LayerSpec& layer, const MachineConfig& cfg,
                     Strategy strategy, const RunOptions& opts = {});

// Layers are simulated concurrently; the result order is the table order.
CycleReport RunLayers(std::string model, const std::vector<LayerSpec>& layers,
                      const MachineConfig& cfg, Strategy strategy,
                      const RunOptions& opts = {});
CycleReport RunModel(std::string_view model, const MachineConfig& cfg,
                     Strategy strategy, Precision precision,
                     const RunOptions& opts = {});

Aggregate Summarize(const std::vector<LayerRecord>& layers,
                    const MachineConfig& cfg, Precision p);

// FF-only, CF-only and mixed totals of one model.
struct StrategyComparison {
  std::string model;
  Precision precision = Precision::kP16;
  CycleReport ff;
  CycleReport cf;
  CycleReport mixed;
  double ff_over_mixed = 0;
  double cf_over_mixed = 0;
};

StrategyComparison CompareStrategies(std::string_view model,
                                     const MachineConfig& cfg, Precision p,
                                     const RunOptions& opts = {});

struct SweepGrid {
  std::vector<int> lanes;
  std::vector<int> tile_r;
  std::vector<int> tile_c;
  std::vector<Precision> precisions;
};

struct SweepRow {
  int lanes = 0;
  int tile_r = 0;
  int tile_c = 0;
  Precision precision = Precision::kP16;
  std::optional<Aggregate> aggregate;
  std::string error;  // set when the cell failed
};

// Cells failing with an Error are recorded and the sweep continues.
std::vector<SweepRow> Sweep(const MachineConfig& base, const SweepGrid& grid,
                            std::string_view model, Strategy strategy);

// Byte-stable emitters; formats are documented in docs/report-schema.md.
std::string ReportJson(const CycleReport& r);
std::string ReportCsv(const CycleReport& r);
std::string ComparisonJson(const StrategyComparison& c);
std::string ComparisonCsv(const StrategyComparison& c);
std::string SweepCsv(const std::vector<SweepRow>& rows);
std::string SweepJson(const std::vector<SweepRow>& rows);

// Area-efficiency ratios quoted for GoogLeNet at 16 bits (mixed over FF-only
// and over CF-only). Shown next to our cycle ratios, never compared.
// Process exit status for the command-line tool: 0 success, 1 verification
// failure, 2 any other error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerify = 1;
inline constexpr int kExitError = 2;
int ExitCodeFor(ErrorCode code);

inline constexpr double kReferenceFfRatio = 1.88;
inline constexpr double kReferenceCfRatio = 1.38;

}  // namespace speed

#endif  // SPEED_REPORT_H_
