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

#include "speed/layer.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <sstream>

#include "speed/error.h"

namespace speed {

std::uint64_t LayerSpec::macs() const {
  return std::uint64_t(cin) * std::uint64_t(cout) * std::uint64_t(k) *
         std::uint64_t(k) * std::uint64_t(oh()) * std::uint64_t(ow());
}

void LayerSpec::Validate() const {
  if (cin < 1 || cout < 1 || h < 1 || w < 1 || k < 1 || stride < 1 || pad < 0) {
    throw Error(ErrorCode::kShapeMismatch,
                "layer " + name + ": sizes must be positive");
  }
  if (h + 2 * pad < k || w + 2 * pad < k) {
    throw Error(ErrorCode::kShapeMismatch,
                "layer " + name + ": kernel larger than padded input");
  }
}

namespace {

int ParseInt(std::string_view key, std::string_view v) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(ErrorCode::kParseError,
                "bad integer for " + std::string(key) + ": " + std::string(v));
  }
  return out;
}

}  // namespace

LayerSpec ParseLayerRecord(std::string_view line) {
  LayerSpec l;
  bool seen[5] = {};
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kParseError, "expected key=value, got " + tok);
    }
    const std::string_view key = std::string_view(tok).substr(0, eq);
    const std::string_view val = std::string_view(tok).substr(eq + 1);
    if (key == "name") {
      l.name = std::string(val);
    } else if (key == "cin") {
      l.cin = ParseInt(key, val);
      seen[0] = true;
    } else if (key == "cout") {
      l.cout = ParseInt(key, val);
      seen[1] = true;
    } else if (key == "h") {
      l.h = ParseInt(key, val);
      seen[2] = true;
    } else if (key == "w") {
      l.w = ParseInt(key, val);
      seen[3] = true;
    } else if (key == "k") {
      l.k = ParseInt(key, val);
      seen[4] = true;
    } else if (key == "stride") {
      l.stride = ParseInt(key, val);
    } else if (key == "pad") {
      l.pad = ParseInt(key, val);
    } else if (key == "precision") {
      l.precision = ParsePrecision(val);
    } else if (key == "from" || key == "pool") {
      // Chaining annotations, read by the model validator.
    } else {
      throw Error(ErrorCode::kParseError, "unknown layer field " + std::string(key));
    }
  }
  if (!std::all_of(std::begin(seen), std::end(seen), [](bool b) { return b; })) {
    throw Error(ErrorCode::kParseError,
                "layer record needs cin, cout, h, w and k: " + std::string(line));
  }
  l.Validate();
  return l;
}

std::string FormatLayerRecord(const LayerSpec& l) {
  std::ostringstream out;
  out << "name=" << l.name << " cin=" << l.cin << " cout=" << l.cout
      << " h=" << l.h << " w=" << l.w << " k=" << l.k << " stride=" << l.stride
      << " pad=" << l.pad << " precision=" << PrecisionName(l.precision);
  return out.str();
}

std::vector<LayerSpec> ParseLayerFile(std::string_view text) {
  std::vector<LayerSpec> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ParseLayerRecord(line));
    } catch (const Error& e) {
      throw Error::AtLine(n, e.message());
    }
  }
  return out;
}

int Requantize(Accumulator acc, Precision out, unsigned shift) {
  const int shifted = acc >> std::min(shift, 31u);
  return std::clamp(shifted, OperandMin(out), OperandMax(out));
}

unsigned DefaultShift(const LayerSpec& l) {
  const auto terms = static_cast<std::uint64_t>(l.cin) * l.k * l.k;
  const unsigned half = (static_cast<unsigned>(std::bit_width(terms)) + 1) / 2;
  return std::min(31u, static_cast<unsigned>(OperandBits(l.precision) - 1) + half);
}

}  // namespace speed
