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

#ifndef SPEED_LAYER_H_
#define SPEED_LAYER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "speed/isa.h"
#include "speed/sau.h"

namespace speed {

// One convolution layer, N = 1, square kernel. Output dims use floor division.
struct LayerSpec {
  std::string name;
  int cin = 1;
  int cout = 1;
  int h = 1;
  int w = 1;
  int k = 1;
  int stride = 1;
  int pad = 0;
  Precision precision = Precision::kP16;

  int oh() const { return (h + 2 * pad - k) / stride + 1; }
  int ow() const { return (w + 2 * pad - k) / stride + 1; }
  std::uint64_t macs() const;
  // Throws Error(kShapeMismatch) for non-positive sizes or empty outputs.
  void Validate() const;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// Parses whitespace-separated key=value fields (name, cin, cout, h, w, k,
// stride, pad, precision). Missing stride/pad default to 1/0.
LayerSpec ParseLayerRecord(std::string_view line);
std::string FormatLayerRecord(const LayerSpec& layer);

// One record per non-blank line, `#` comments.
std::vector<LayerSpec> ParseLayerFile(std::string_view text);

// Arithmetic right shift, then clamp to the precision's signed range.
int Requantize(Accumulator acc, Precision out, unsigned shift);

// (b - 1) + ceil(bit_width(cin * k * k) / 2), at most 31.
unsigned DefaultShift(const LayerSpec& layer);

}  // namespace speed

#endif  // SPEED_LAYER_H_
