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

#include "speed/config.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "speed/error.h"

namespace speed {
namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int ParseInt(std::string_view key, std::string_view value) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::kConfigError, "bad integer for " + std::string(key) +
                                             ": '" + std::string(value) + "'");
  }
  return out;
}

double ParseDouble(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const double d = std::stod(std::string(value), &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kConfigError, "bad number for " + std::string(key) +
                                             ": '" + std::string(value) + "'");
  }
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw Error(ErrorCode::kConfigError,
              "bad boolean for " + std::string(key) + ": '" +
                  std::string(value) + "'");
}

}  // namespace

void MachineConfig::Validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kConfigError, msg);
  };
  if (lanes < 1) fail("lanes must be >= 1");
  if (tile_r < 1 || tile_c < 1) fail("tile_r and tile_c must be >= 1");
  if (mem_bw_bits < 8) fail("mem_bw_bits must be >= 8");
  if (mem_latency < 0) fail("mem_latency must be >= 0");
  if (num_vregs < 1 || num_vregs > 32) fail("num_vregs must be in [1, 32]");
  if (vlen_bits <= 0 || vlen_bits % lanes != 0) {
    fail("vlen_bits must be a positive multiple of lanes");
  }
  // Elements are at most 64 bits; a lane slice must hold whole elements.
  if (slice_bits() % 64 != 0) fail("per-lane register slice must be a multiple of 64 bits");
  if (queue_depth < 1) fail("queue_depth must be >= 1");
  if (!(freq_mhz > 0)) fail("freq_mhz must be positive");
  if (area_mm2 && !(*area_mm2 > 0)) fail("area_mm2 must be positive");
}

MachineConfig ParseConfig(std::string_view text) {
  MachineConfig cfg;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfigError,
                  "line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = Trim(line.substr(0, eq));
    const auto value = Trim(line.substr(eq + 1));
    if (key == "lanes") cfg.lanes = ParseInt(key, value);
    else if (key == "vlen_bits") cfg.vlen_bits = ParseInt(key, value);
    else if (key == "num_vregs") cfg.num_vregs = ParseInt(key, value);
    else if (key == "mem_bw_bits") cfg.mem_bw_bits = ParseInt(key, value);
    else if (key == "mem_latency") cfg.mem_latency = ParseInt(key, value);
    else if (key == "freq_mhz") cfg.freq_mhz = ParseDouble(key, value);
    else if (key == "tile_r") cfg.tile_r = ParseInt(key, value);
    else if (key == "tile_c") cfg.tile_c = ParseInt(key, value);
    else if (key == "queue_depth") cfg.queue_depth = ParseInt(key, value);
    else if (key == "overlap_load_compute") cfg.overlap_load_compute = ParseBool(key, value);
    else if (key == "area_mm2") cfg.area_mm2 = ParseDouble(key, value);
    else {
      throw Error(ErrorCode::kConfigError,
                  "line " + std::to_string(line_no) + ": unknown key '" +
                      std::string(key) + "'");
    }
  }
  cfg.Validate();
  return cfg;
}

MachineConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str());
}

std::string FormatConfig(const MachineConfig& cfg) {
  std::ostringstream os;
  os << "lanes = " << cfg.lanes << "\n"
     << "vlen_bits = " << cfg.vlen_bits << "\n"
     << "num_vregs = " << cfg.num_vregs << "\n"
     << "mem_bw_bits = " << cfg.mem_bw_bits << "\n"
     << "mem_latency = " << cfg.mem_latency << "\n"
     << "freq_mhz = " << cfg.freq_mhz << "\n"
     << "tile_r = " << cfg.tile_r << "\n"
     << "tile_c = " << cfg.tile_c << "\n"
     << "queue_depth = " << cfg.queue_depth << "\n"
     << "overlap_load_compute = " << (cfg.overlap_load_compute ? "true" : "false") << "\n";
  if (cfg.area_mm2) os << "area_mm2 = " << *cfg.area_mm2 << "\n";
  return os.str();
}

}  // namespace speed
