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

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "speed/error.h"
#include "speed/machine.h"
#include "speed/models.h"
#include "speed/tensor.h"

namespace speed {
namespace {

using Json = nlohmann::ordered_json;

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string OptNum(const std::optional<std::uint64_t>& v) {
  return v ? std::to_string(*v) : std::string();
}

Json OptJson(const std::optional<std::uint64_t>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<Schedule> TryPlan(const LayerSpec& l, const MachineConfig& cfg,
                                Dataflow d) {
  try {
    return Plan(l, cfg, d);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInfeasible) throw;
    return std::nullopt;
  }
}

std::uint64_t SimulateTiming(const Schedule& s) {
  Machine m(s.cfg, {}, /*functional=*/false);
  ForEachIssue(s, [&](const Issue& is) { m.Execute(is); });
  return m.cycle();
}

std::uint64_t SimulateAndVerify(const Schedule& s, std::uint64_t seed) {
  const LayerSpec& l = s.layer;
  const Tensor input = GenTensor(seed, l.cin, l.h, l.w, l.precision);
  const WeightTensor weights =
      GenWeights(seed ^ 0x5745494748545321ULL, l.cout, l.cin, l.k, l.precision);
  Machine m(s.cfg, StageMemory(s, input, weights));
  ForEachIssue(s, [&](const Issue& is) { m.Execute(is); });
  const unsigned shift = DefaultShift(l);
  const Tensor got = ExtractOutput(s, m.memory(), shift);
  const Tensor want = Conv2dRef(input, weights, l, shift);
  for (std::size_t i = 0; i < want.values.size(); ++i) {
    if (got.values[i] != want.values[i]) {
      const std::size_t plane = static_cast<std::size_t>(want.h) * want.w;
      throw Error(ErrorCode::kVerificationFailed,
                  "layer " + l.name + ": output mismatch at index " +
                      std::to_string(i) + " (c=" + std::to_string(i / plane) +
                      ", y=" + std::to_string(i % plane / want.w) +
                      ", x=" + std::to_string(i % want.w) + "): got " +
                      std::to_string(got.values[i]) + ", expected " +
                      std::to_string(want.values[i]));
    }
  }
  return m.cycle();
}

Json ConfigJson(const MachineConfig& c) {
  Json j;
  j["lanes"] = c.lanes;
  j["vlen_bits"] = c.vlen_bits;
  j["num_vregs"] = c.num_vregs;
  j["mem_bw_bits"] = c.mem_bw_bits;
  j["mem_latency"] = c.mem_latency;
  j["freq_mhz"] = c.freq_mhz;
  j["tile_r"] = c.tile_r;
  j["tile_c"] = c.tile_c;
  j["queue_depth"] = c.queue_depth;
  j["overlap_load_compute"] = c.overlap_load_compute;
  j["area_mm2"] = c.area_mm2 ? Json(*c.area_mm2) : Json(nullptr);
  return j;
}

Json AggregateJson(const Aggregate& a) {
  Json j;
  j["total_cycles"] = a.total_cycles;
  j["total_macs"] = a.total_macs;
  j["op_per_cycle"] = a.op_per_cycle;
  j["mean_op_per_cycle"] = a.mean_op_per_cycle;
  j["gops"] = a.gops;
  j["peak_gops"] = a.peak_gops;
  j["theoretical_peak_gops"] = a.theoretical_peak_gops;
  return j;
}

Json ReportToJson(const CycleReport& r) {
  Json j;
  j["schema"] = "speedsim.report/1";
  j["model"] = r.model;
  j["precision"] = std::string(PrecisionName(r.precision));
  j["strategy"] = std::string(StrategyName(r.strategy));
  j["config"] = ConfigJson(r.config);
  Json layers = Json::array();
  for (const auto& l : r.layers) {
    Json x;
    x["name"] = l.name;
    x["cin"] = l.cin;
    x["cout"] = l.cout;
    x["h"] = l.h;
    x["w"] = l.w;
    x["k"] = l.k;
    x["stride"] = l.stride;
    x["pad"] = l.pad;
    x["strategy"] = std::string(DataflowName(l.strategy));
    x["cycles_ff"] = OptJson(l.cycles_ff);
    x["cycles_cf"] = OptJson(l.cycles_cf);
    x["cycles_used"] = l.cycles_used;
    x["macs"] = l.macs;
    x["op_per_cycle"] = l.op_per_cycle;
    x["utilization"] = l.utilization;
    x["gops"] = l.gops;
    x["gops_per_mm2"] = l.gops_per_mm2 ? Json(*l.gops_per_mm2) : Json(nullptr);
    x["verified"] = l.verified;
    layers.push_back(std::move(x));
  }
  j["layers"] = std::move(layers);
  j["aggregate"] = AggregateJson(r.aggregate);
  return j;
}

constexpr char kLayerCsvHeader[] =
    "model,layer,cin,cout,h,w,k,stride,pad,precision,strategy,cycles_ff,"
    "cycles_cf,cycles_used,macs,op_per_cycle,utilization,gops,gops_per_mm2,"
    "verified\n";

void AppendLayerRows(std::ostringstream& out, const CycleReport& r) {
  for (const auto& l : r.layers) {
    out << r.model << ',' << l.name << ',' << l.cin << ',' << l.cout << ','
        << l.h << ',' << l.w << ',' << l.k << ',' << l.stride << ',' << l.pad
        << ',' << PrecisionName(l.precision) << ',' << DataflowName(l.strategy)
        << ',' << OptNum(l.cycles_ff) << ',' << OptNum(l.cycles_cf) << ','
        << l.cycles_used << ',' << l.macs << ',' << Num(l.op_per_cycle) << ','
        << Num(l.utilization) << ',' << Num(l.gops) << ','
        << (l.gops_per_mm2 ? Num(*l.gops_per_mm2) : std::string()) << ','
        << (l.verified ? "true" : "false") << '\n';
  }
}

}  // namespace

Strategy ParseStrategy(std::string_view text) {
  if (text == "ff") return Strategy::kFF;
  if (text == "cf") return Strategy::kCF;
  if (text == "mixed") return Strategy::kMixed;
  throw Error(ErrorCode::kConfigError,
              "unknown strategy " + std::string(text) + " (ff, cf or mixed)");
}

std::string_view StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kFF: return "ff";
    case Strategy::kCF: return "cf";
    case Strategy::kMixed: return "mixed";
  }
  return "?";
}

double TheoreticalPeakOpsPerCycle(const MachineConfig& cfg, Precision p) {
  return 2.0 * cfg.lanes * cfg.tile_r * cfg.tile_c * IcPar(p);
}

double TheoreticalPeakGops(const MachineConfig& cfg, Precision p) {
  return TheoreticalPeakOpsPerCycle(cfg, p) * cfg.freq_mhz * 1e-3;
}

LayerRecord RunLayer(const LayerSpec& layer, const MachineConfig& cfg,
                     Strategy strategy, const RunOptions& opts) {
  const std::optional<Schedule> ff = TryPlan(layer, cfg, Dataflow::kFF);
  const std::optional<Schedule> cf = TryPlan(layer, cfg, Dataflow::kCF);
  const Schedule* chosen = nullptr;
  switch (strategy) {
    case Strategy::kFF:
      if (ff) chosen = &*ff;
      break;
    case Strategy::kCF:
      if (cf) chosen = &*cf;
      break;
    case Strategy::kMixed:
      if (ff && (!cf || ff->est_cycles < cf->est_cycles)) {
        chosen = &*ff;
      } else if (cf) {
        chosen = &*cf;
      }
      break;
  }
  if (!chosen) {
    // Re-plan to surface the planner's own message.
    Plan(layer, cfg, strategy == Strategy::kCF ? Dataflow::kCF : Dataflow::kFF);
    throw Error(ErrorCode::kInfeasible, "layer " + layer.name + " cannot be planned");
  }
  LayerRecord r;
  r.name = layer.name;
  r.cin = layer.cin;
  r.cout = layer.cout;
  r.h = layer.h;
  r.w = layer.w;
  r.k = layer.k;
  r.stride = layer.stride;
  r.pad = layer.pad;
  r.precision = layer.precision;
  r.strategy = chosen->strategy;
  if (ff) r.cycles_ff = ff->est_cycles;
  if (cf) r.cycles_cf = cf->est_cycles;
  r.cycles_used = opts.verify ? SimulateAndVerify(*chosen, opts.seed)
                              : SimulateTiming(*chosen);
  r.verified = opts.verify;
  if (r.cycles_used != chosen->est_cycles) {
    throw Error(ErrorCode::kVerificationFailed,
                "layer " + layer.name + ": simulated " +
                    std::to_string(r.cycles_used) + " cycles, planner estimated " +
                    std::to_string(chosen->est_cycles));
  }
  r.macs = layer.macs();
  r.op_per_cycle = 2.0 * static_cast<double>(r.macs) / static_cast<double>(r.cycles_used);
  r.utilization = r.op_per_cycle / TheoreticalPeakOpsPerCycle(cfg, layer.precision);
  r.gops = r.op_per_cycle * cfg.freq_mhz * 1e-3;
  if (cfg.area_mm2) r.gops_per_mm2 = r.gops / *cfg.area_mm2;
  return r;
}

Aggregate Summarize(const std::vector<LayerRecord>& layers,
                    const MachineConfig& cfg, Precision p) {
  Aggregate a;
  double sum_opc = 0;
  for (const auto& l : layers) {
    a.total_cycles += l.cycles_used;
    a.total_macs += l.macs;
    sum_opc += l.op_per_cycle;
    a.peak_gops = std::max(a.peak_gops, l.gops);
  }
  if (a.total_cycles > 0) {
    a.op_per_cycle = 2.0 * static_cast<double>(a.total_macs) /
                     static_cast<double>(a.total_cycles);
  }
  if (!layers.empty()) a.mean_op_per_cycle = sum_opc / static_cast<double>(layers.size());
  a.gops = a.op_per_cycle * cfg.freq_mhz * 1e-3;
  a.theoretical_peak_gops = TheoreticalPeakGops(cfg, p);
  return a;
}

CycleReport RunLayers(std::string model, const std::vector<LayerSpec>& layers,
                      const MachineConfig& cfg, Strategy strategy,
                      const RunOptions& opts) {
  CycleReport r;
  r.model = std::move(model);
  r.precision = layers.empty() ? Precision::kP16 : layers.front().precision;
  r.strategy = strategy;
  r.config = cfg;
  r.layers.resize(layers.size());
  std::vector<std::exception_ptr> errors(layers.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < layers.size(); i = next++) {
      try {
        r.layers[i] = RunLayer(layers[i], cfg, strategy, opts);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min<std::size_t>(
      layers.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      if (e.message().find(layers[i].name) != std::string::npos) throw;
      throw Error(e.code(), "layer " + layers[i].name + ": " + e.message());
    }
  }
  r.aggregate = Summarize(r.layers, cfg, r.precision);
  return r;
}

CycleReport RunModel(std::string_view model, const MachineConfig& cfg,
                     Strategy strategy, Precision precision,
                     const RunOptions& opts) {
  const ModelSpec m = ModelLayers(model, precision);
  CycleReport r = RunLayers(m.name, m.layers, cfg, strategy, opts);
  r.precision = precision;
  r.aggregate = Summarize(r.layers, cfg, precision);
  return r;
}

StrategyComparison CompareStrategies(std::string_view model,
                                     const MachineConfig& cfg, Precision p,
                                     const RunOptions& opts) {
  StrategyComparison c;
  c.ff = RunModel(model, cfg, Strategy::kFF, p, opts);
  c.cf = RunModel(model, cfg, Strategy::kCF, p, opts);
  c.mixed = RunModel(model, cfg, Strategy::kMixed, p, opts);
  c.model = c.mixed.model;
  c.precision = p;
  const auto mixed = static_cast<double>(c.mixed.aggregate.total_cycles);
  c.ff_over_mixed = static_cast<double>(c.ff.aggregate.total_cycles) / mixed;
  c.cf_over_mixed = static_cast<double>(c.cf.aggregate.total_cycles) / mixed;
  return c;
}

std::vector<SweepRow> Sweep(const MachineConfig& base, const SweepGrid& grid,
                            std::string_view model, Strategy strategy) {
  if (grid.lanes.empty() || grid.tile_r.empty() || grid.tile_c.empty() ||
      grid.precisions.empty()) {
    throw Error(ErrorCode::kConfigError, "sweep grid is empty");
  }
  std::vector<SweepRow> rows;
  for (int lanes : grid.lanes) {
    for (int tr : grid.tile_r) {
      for (int tc : grid.tile_c) {
        for (Precision p : grid.precisions) {
          SweepRow row;
          row.lanes = lanes;
          row.tile_r = tr;
          row.tile_c = tc;
          row.precision = p;
          MachineConfig cfg = base;
          cfg.lanes = lanes;
          cfg.tile_r = tr;
          cfg.tile_c = tc;
          try {
            cfg.Validate();
            row.aggregate = RunModel(model, cfg, strategy, p).aggregate;
          } catch (const Error& e) {
            if (e.code() == ErrorCode::kUnknownModel) throw;
            row.error = e.what();
          }
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

std::string ReportJson(const CycleReport& r) { return ReportToJson(r).dump(2) + "\n"; }

std::string ReportCsv(const CycleReport& r) {
  std::ostringstream out;
  out << kLayerCsvHeader;
  AppendLayerRows(out, r);
  return out.str();
}

std::string ComparisonJson(const StrategyComparison& c) {
  Json j;
  j["schema"] = "speedsim.comparison/1";
  j["model"] = c.model;
  j["precision"] = std::string(PrecisionName(c.precision));
  Json totals;
  totals["ff"] = c.ff.aggregate.total_cycles;
  totals["cf"] = c.cf.aggregate.total_cycles;
  totals["mixed"] = c.mixed.aggregate.total_cycles;
  j["total_cycles"] = std::move(totals);
  j["ff_over_mixed"] = c.ff_over_mixed;
  j["cf_over_mixed"] = c.cf_over_mixed;
  Json ref;
  ref["metric"] = "area efficiency, synthesized RTL; informational only";
  ref["ff_over_mixed"] = kReferenceFfRatio;
  ref["cf_over_mixed"] = kReferenceCfRatio;
  j["reference"] = std::move(ref);
  j["mixed"] = ReportToJson(c.mixed);
  return j.dump(2) + "\n";
}

std::string ComparisonCsv(const StrategyComparison& c) {
  std::ostringstream out;
  out << "model,precision,strategy,total_cycles,ratio_over_mixed,"
         "reference_ratio\n";
  const double mixed = static_cast<double>(c.mixed.aggregate.total_cycles);
  auto row = [&](std::string_view name, const CycleReport& r,
                 std::optional<double> ref) {
    out << c.model << ',' << PrecisionName(c.precision) << ',' << name << ','
        << r.aggregate.total_cycles << ','
        << Num(static_cast<double>(r.aggregate.total_cycles) / mixed) << ','
        << (ref ? Num(*ref) : std::string()) << '\n';
  };
  row("ff", c.ff, kReferenceFfRatio);
  row("cf", c.cf, kReferenceCfRatio);
  row("mixed", c.mixed, std::nullopt);
  return out.str();
}

std::string SweepCsv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "lanes,tile_r,tile_c,precision,total_cycles,total_macs,op_per_cycle,"
         "mean_op_per_cycle,gops,peak_gops,theoretical_peak_gops,error\n";
  for (const auto& r : rows) {
    out << r.lanes << ',' << r.tile_r << ',' << r.tile_c << ','
        << PrecisionName(r.precision) << ',';
    if (r.aggregate) {
      const Aggregate& a = *r.aggregate;
      out << a.total_cycles << ',' << a.total_macs << ',' << Num(a.op_per_cycle)
          << ',' << Num(a.mean_op_per_cycle) << ',' << Num(a.gops) << ','
          << Num(a.peak_gops) << ',' << Num(a.theoretical_peak_gops) << ',';
    } else {
      out << ",,,,,,,";
    }
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << err << '\n';
  }
  return out.str();
}

std::string SweepJson(const std::vector<SweepRow>& rows) {
  Json j;
  j["schema"] = "speedsim.sweep/1";
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json x;
    x["lanes"] = r.lanes;
    x["tile_r"] = r.tile_r;
    x["tile_c"] = r.tile_c;
    x["precision"] = std::string(PrecisionName(r.precision));
    x["aggregate"] = r.aggregate ? AggregateJson(*r.aggregate) : Json(nullptr);
    x["error"] = r.error.empty() ? Json(nullptr) : Json(r.error);
    arr.push_back(std::move(x));
  }
  j["rows"] = std::move(arr);
  return j.dump(2) + "\n";
}

int ExitCodeFor(ErrorCode code) {
  return code == ErrorCode::kVerificationFailed ? kExitVerify : kExitError;
}

}  // namespace speed
