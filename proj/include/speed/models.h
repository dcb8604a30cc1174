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

#ifndef SPEED_MODELS_H_
#define SPEED_MODELS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "speed/isa.h"
#include "speed/layer.h"

namespace speed {

inline constexpr std::string_view kModelNames[] = {"VGG16", "ResNet18",
                                                   "GoogLeNet", "SqueezeNet"};

struct ModelSpec {
  std::string name;
  std::vector<LayerSpec> layers;
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Conv layers of a benchmark network. Names match case-insensitively.
// `precision` overrides every layer's precision. Throws Error(kUnknownModel).
ModelSpec ModelLayers(std::string_view name,
                      std::optional<Precision> precision = std::nullopt);

// The shipped table text.
std::string_view ModelTable(std::string_view name);

// Checks `from=` / `pool=` annotations: every layer's input shape must equal
// the output shape of its sources (channels summed for a concat, spatial dims
// after the optional pool). Throws Error(kShapeMismatch).
void ValidateChaining(std::string_view table);

}  // namespace speed

#endif  // SPEED_MODELS_H_
