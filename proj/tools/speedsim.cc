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

// speedsim: command-line front end of the simulator.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "speed/config.h"
#include "speed/dataflow.h"
#include "speed/error.h"
#include "speed/isa.h"
#include "speed/layer.h"
#include "speed/models.h"
#include "speed/report.h"

namespace {

using speed::Error;
using speed::ErrorCode;
using speed::kExitError;
using speed::kExitOk;

struct Common {
  std::string config_path;
  std::string precision;
  std::string strategy = "mixed";
  std::uint64_t seed = 1;
  std::string out = "json";
};

void AddCommon(CLI::App* cmd, Common& c, bool with_strategy = true) {
  cmd->add_option("--config", c.config_path, "Machine config file (key = value)");
  cmd->add_option("--precision", c.precision, "Operand precision: 4, 8 or 16");
  if (with_strategy) {
    cmd->add_option("--strategy", c.strategy, "ff, cf or mixed")
        ->check(CLI::IsMember({"ff", "cf", "mixed"}));
  }
  cmd->add_option("--seed", c.seed, "Seed for generated tensors");
  cmd->add_option("--out", c.out, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
}

speed::MachineConfig LoadMachine(const Common& c) {
  speed::MachineConfig cfg;
  if (!c.config_path.empty()) cfg = speed::LoadConfig(c.config_path);
  cfg.Validate();
  return cfg;
}

std::optional<speed::Precision> PrecisionOverride(const Common& c) {
  if (c.precision.empty()) return std::nullopt;
  return speed::ParsePrecision(c.precision);
}

std::string ReadFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<speed::LayerSpec> CollectLayers(const std::vector<std::string>& records,
                                            const std::string& file,
                                            const Common& c) {
  std::vector<speed::LayerSpec> layers;
  if (!file.empty()) layers = speed::ParseLayerFile(ReadFile(file));
  for (const auto& r : records) layers.push_back(speed::ParseLayerRecord(r));
  if (layers.empty()) {
    throw Error(ErrorCode::kConfigError, "no layers given (use --layer or --layers)");
  }
  int n = 0;
  for (auto& l : layers) {
    if (l.name.empty()) l.name = "layer" + std::to_string(n);
    ++n;
  }
  if (auto p = PrecisionOverride(c)) {
    for (auto& l : layers) l.precision = *p;
  }
  return layers;
}

std::vector<int> ParseIntList(const std::string& text) {
  std::vector<int> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigError, "bad integer list: " + text);
    }
  }
  return out;
}

void Emit(const std::string& text) { std::fwrite(text.data(), 1, text.size(), stdout); }

std::vector<std::uint32_t> ReadWords(const std::string& path, bool binary) {
  const std::string data = ReadFile(path);
  std::vector<std::uint32_t> words;
  if (binary) {
    if (data.size() % 4 != 0) {
      throw Error(ErrorCode::kIoError, path + " is not a whole number of words");
    }
    for (std::size_t i = 0; i < data.size(); i += 4) {
      std::uint32_t w = 0;
      for (int b = 3; b >= 0; --b) {
        w = (w << 8) | static_cast<std::uint8_t>(data[i + static_cast<std::size_t>(b)]);
      }
      words.push_back(w);
    }
    return words;
  }
  std::istringstream in(data);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream toks(line);
    std::string tok;
    if (!(toks >> tok)) continue;
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(tok, &used, 0);
      if (used != tok.size() || v > 0xffffffffUL) throw std::out_of_range(tok);
      words.push_back(static_cast<std::uint32_t>(v));
    } catch (const std::exception&) {
      throw Error::AtLine(n, "expected an instruction word, got " + tok);
    }
  }
  return words;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-approximate simulator of a multi-precision RISC-V vector "
               "processor with systolic-array lanes"};
  app.require_subcommand(1);

  Common c;
  std::vector<std::string> layer_records;
  std::string layer_file;
  bool verify = false;
  bool dump_schedule = false;
  std::string model;
  int crop = 0;
  std::string lanes_list, tile_r_list, tile_c_list, precision_list;
  std::string words_path;
  bool binary = false;
  std::string out_path;

  auto* run_layer = app.add_subcommand("run-layer", "Simulate individual layers");
  AddCommon(run_layer, c);
  run_layer->add_option("--layer", layer_records,
                        "Layer record, e.g. \"name=a cin=64 cout=64 h=28 w=28 k=3 pad=1\"");
  run_layer->add_option("--layers", layer_file, "File with one layer record per line");
  run_layer->add_flag("--verify", verify, "Check outputs against the reference convolution");
  run_layer->add_flag("--dump-schedule", dump_schedule,
                      "Print the stage listing of each schedule to stderr");

  auto* run_model = app.add_subcommand("run-model", "Simulate every conv layer of a model");
  AddCommon(run_model, c);
  run_model->add_option("model", model, "VGG16, ResNet18, GoogLeNet or SqueezeNet")->required();
  run_model->add_flag("--verify", verify, "Check outputs against the reference convolution");

  auto* compare = app.add_subcommand("compare-strategies",
                                     "FF-only, CF-only and mixed totals of a model");
  AddCommon(compare, c, /*with_strategy=*/false);
  compare->add_option("model", model, "Model name")->required();

  auto* sweep = app.add_subcommand("sweep", "Aggregate metrics over a configuration grid");
  AddCommon(sweep, c);
  sweep->add_option("model", model, "Model name")->required();
  sweep->add_option("--lanes", lanes_list, "Comma-separated lane counts");
  sweep->add_option("--tile-r", tile_r_list, "Comma-separated tile_r values");
  sweep->add_option("--tile-c", tile_c_list, "Comma-separated tile_c values");
  sweep->add_option("--precisions", precision_list, "Comma-separated precisions");

  auto* verify_cmd = app.add_subcommand(
      "verify", "Functional simulation against the reference convolution");
  AddCommon(verify_cmd, c);
  verify_cmd->add_option("model", model, "Model name (or use --layer/--layers)");
  verify_cmd->add_option("--layer", layer_records, "Layer record");
  verify_cmd->add_option("--layers", layer_file, "Layer file");
  verify_cmd->add_option("--crop", crop,
                         "Limit input height and width of model layers to this size");

  auto* disasm = app.add_subcommand("disasm", "Decode instruction words to assembly");
  disasm->add_option("file", words_path, "Hex words, one per line (or raw with --binary)")
      ->required();
  disasm->add_flag("--binary", binary, "Input is little-endian 32-bit words");

  auto* assemble = app.add_subcommand("asm", "Assemble to instruction words");
  assemble->add_option("file", words_path, "Assembly source")->required();
  assemble->add_option("-o,--output", out_path, "Write little-endian words to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }

  try {
    const auto strategy = speed::ParseStrategy(c.strategy);
    speed::RunOptions opts;
    opts.seed = c.seed;
    const bool json = c.out == "json";

    if (*run_layer || *verify_cmd) {
      const speed::MachineConfig cfg = LoadMachine(c);
      std::vector<speed::LayerSpec> layers;
      std::string name = "layers";
      if (*verify_cmd && !model.empty()) {
        const speed::ModelSpec m = speed::ModelLayers(model, PrecisionOverride(c));
        name = m.name;
        layers = m.layers;
        if (crop > 0) {
          for (auto& l : layers) {
            l.h = std::max(std::min(l.h, crop), l.k);
            l.w = std::max(std::min(l.w, crop), l.k);
          }
        }
      } else {
        layers = CollectLayers(layer_records, layer_file, c);
      }
      opts.verify = verify || *verify_cmd;
      if (dump_schedule) {
        for (const auto& l : layers) {
          const auto choice = speed::SelectStrategy(l, cfg);
          const auto d = strategy == speed::Strategy::kMixed ? choice.chosen
                         : strategy == speed::Strategy::kFF  ? speed::Dataflow::kFF
                                                             : speed::Dataflow::kCF;
          std::cerr << speed::DumpSchedule(speed::Plan(l, cfg, d));
        }
      }
      const auto report = speed::RunLayers(name, layers, cfg, strategy, opts);
      Emit(json ? speed::ReportJson(report) : speed::ReportCsv(report));
    } else if (*run_model) {
      const speed::MachineConfig cfg = LoadMachine(c);
      opts.verify = verify;
      const auto p = PrecisionOverride(c).value_or(speed::Precision::kP16);
      const auto report = speed::RunModel(model, cfg, strategy, p, opts);
      Emit(json ? speed::ReportJson(report) : speed::ReportCsv(report));
    } else if (*compare) {
      const speed::MachineConfig cfg = LoadMachine(c);
      const auto p = PrecisionOverride(c).value_or(speed::Precision::kP16);
      const auto cmp = speed::CompareStrategies(model, cfg, p, opts);
      Emit(json ? speed::ComparisonJson(cmp) : speed::ComparisonCsv(cmp));
    } else if (*sweep) {
      const speed::MachineConfig cfg = LoadMachine(c);
      speed::SweepGrid grid;
      grid.lanes = lanes_list.empty() ? std::vector<int>{cfg.lanes} : ParseIntList(lanes_list);
      grid.tile_r = tile_r_list.empty() ? std::vector<int>{cfg.tile_r} : ParseIntList(tile_r_list);
      grid.tile_c = tile_c_list.empty() ? std::vector<int>{cfg.tile_c} : ParseIntList(tile_c_list);
      if (!precision_list.empty()) {
        for (int bits : ParseIntList(precision_list)) {
          grid.precisions.push_back(speed::ParsePrecision(std::to_string(bits)));
        }
      } else {
        grid.precisions.push_back(PrecisionOverride(c).value_or(speed::Precision::kP16));
      }
      const auto rows = speed::Sweep(cfg, grid, model, strategy);
      Emit(json ? speed::SweepJson(rows) : speed::SweepCsv(rows));
    } else if (*disasm) {
      const auto words = ReadWords(words_path, binary);
      for (std::size_t i = 0; i < words.size(); ++i) {
        speed::Instruction in;
        try {
          in = speed::Decode(words[i]);
        } catch (const Error& e) {
          throw e.WithPc(i);
        }
        char hex[16];
        std::snprintf(hex, sizeof hex, "0x%08x", words[i]);
        std::cout << speed::Disassemble(in) << "  # " << hex << "\n";
      }
    } else if (*assemble) {
      const auto words = speed::Assemble(ReadFile(words_path));
      if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary);
        for (std::uint32_t w : words) {
          const char b[4] = {static_cast<char>(w), static_cast<char>(w >> 8),
                             static_cast<char>(w >> 16), static_cast<char>(w >> 24)};
          f.write(b, 4);
        }
        if (!f) throw Error(ErrorCode::kIoError, "cannot write " + out_path);
      } else {
        for (std::uint32_t w : words) std::printf("0x%08x\n", w);
      }
    }
  } catch (const Error& e) {
    std::cerr << "speedsim: " << e.what();
    if (e.line()) std::cerr << " (line " << *e.line() << ")";
    if (e.pc()) std::cerr << " (pc " << *e.pc() << ")";
    std::cerr << "\n";
    return ExitCodeFor(e.code());
  }
  return kExitOk;
}
