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

#ifndef SPEED_CONFIG_H_
#define SPEED_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace speed {

// Machine parameters. Defaults are the evaluated SPEED configuration: 4 lanes,
// VLEN 4096, 4x4 systolic array per lane, 500 MHz.
struct MachineConfig {
  int lanes = 4;
  int vlen_bits = 4096;
  int num_vregs = 32;
  int mem_bw_bits = 128;
  int mem_latency = 4;
  double freq_mhz = 500.0;
  int tile_r = 4;
  int tile_c = 4;
  int queue_depth = 8;
  // Hide a load behind the immediately preceding VSAM, up to the VSAM's length.
  bool overlap_load_compute = false;
  // Only used to derive a GOPS/mm^2 column in reports.
  std::optional<double> area_mm2;

  int slice_bits() const { return vlen_bits / lanes; }
  int slice_bytes() const { return slice_bits() / 8; }

  // Throws Error(kConfigError) on inconsistent parameters.
  void Validate() const;

  friend bool operator==(const MachineConfig&, const MachineConfig&) = default;
};

// Parses `key = value` lines; `#` starts a comment. Keys are the field names
// above. Unknown keys are an error.
MachineConfig ParseConfig(std::string_view text);
MachineConfig LoadConfig(const std::string& path);

std::string FormatConfig(const MachineConfig& cfg);

}  // namespace speed

#endif  // SPEED_CONFIG_H_
