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

#include "speed/models.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "speed/error.h"

namespace speed {
namespace internal {
extern const std::string_view kVgg16Table;
extern const std::string_view kResNet18Table;
extern const std::string_view kGoogLeNetTable;
extern const std::string_view kSqueezeNetTable;
}  // namespace internal

namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Output size of a pool annotation: 2 is 2x2/2 floor, 3 is 3x3/2 ceil.
int Pooled(int size, int pool) {
  if (pool == 0) return size;
  if (pool == 2) return size / 2;
  if (pool == 3) return (size - 3 + 1) / 2 + 1;
  throw Error(ErrorCode::kParseError, "unknown pool=" + std::to_string(pool));
}

}  // namespace

std::string_view ModelTable(std::string_view name) {
  const std::string n = Lower(name);
  if (n == "vgg16") return internal::kVgg16Table;
  if (n == "resnet18") return internal::kResNet18Table;
  if (n == "googlenet") return internal::kGoogLeNetTable;
  if (n == "squeezenet") return internal::kSqueezeNetTable;
  throw Error(ErrorCode::kUnknownModel, "unknown model " + std::string(name));
}

ModelSpec ModelLayers(std::string_view name, std::optional<Precision> precision) {
  const std::string_view table = ModelTable(name);
  ModelSpec m;
  for (std::string_view canonical : kModelNames) {
    if (Lower(canonical) == Lower(name)) m.name = std::string(canonical);
  }
  m.layers = ParseLayerFile(table);
  if (precision) {
    for (auto& l : m.layers) l.precision = *precision;
  }
  return m;
}

void ValidateChaining(std::string_view table) {
  struct Shape {
    int c, h, w;
  };
  std::map<std::string, Shape, std::less<>> out_shapes;
  std::istringstream in{std::string(table)};
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const LayerSpec l = ParseLayerRecord(line);
    std::istringstream toks(line);
    std::string tok, from;
    int pool = 0;
    while (toks >> tok) {
      if (tok.rfind("from=", 0) == 0) from = tok.substr(5);
      if (tok.rfind("pool=", 0) == 0) pool = std::stoi(tok.substr(5));
    }
    if (!from.empty()) {
      int channels = 0;
      std::optional<Shape> spatial;
      std::size_t pos = 0;
      while (pos <= from.size()) {
        const std::size_t plus = std::min(from.find('+', pos), from.size());
        const std::string src = from.substr(pos, plus - pos);
        pos = plus + 1;
        const auto it = out_shapes.find(src);
        if (it == out_shapes.end()) {
          throw Error(ErrorCode::kShapeMismatch,
                      "layer " + l.name + " reads unknown layer " + src);
        }
        if (spatial && (spatial->h != it->second.h || spatial->w != it->second.w)) {
          throw Error(ErrorCode::kShapeMismatch,
                      "layer " + l.name + " concatenates maps of different size");
        }
        spatial = it->second;
        channels += it->second.c;
      }
      const int h = Pooled(spatial->h, pool);
      const int w = Pooled(spatial->w, pool);
      if (channels != l.cin || h != l.h || w != l.w) {
        throw Error(ErrorCode::kShapeMismatch,
                    "layer " + l.name + " expects " + std::to_string(l.cin) + "x" +
                        std::to_string(l.h) + "x" + std::to_string(l.w) +
                        " but its sources give " + std::to_string(channels) + "x" +
                        std::to_string(h) + "x" + std::to_string(w));
      }
    }
    if (out_shapes.count(l.name)) {
      throw Error(ErrorCode::kShapeMismatch, "duplicate layer name " + l.name);
    }
    out_shapes[l.name] = {l.cout, l.oh(), l.ow()};
  }
}

}  // namespace speed
