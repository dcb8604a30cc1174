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

#include "speed/tensor.h"

#include <cstring>
#include <fstream>
#include <iterator>

#include "speed/error.h"

namespace speed {

void Tensor::CheckRange() const {
  for (std::int16_t v : values) {
    if (v < OperandMin(precision) || v > OperandMax(precision)) {
      throw Error(ErrorCode::kFieldOverflow,
                  "tensor value " + std::to_string(v) + " out of range for " +
                      std::string(PrecisionName(precision)));
    }
  }
}

Xorshift64Star::Xorshift64Star(std::uint64_t seed) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  state_ = z ^ (z >> 31);
  if (state_ == 0) state_ = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t Xorshift64Star::Next() {
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545f4914f6cdd1dULL;
}

int Xorshift64Star::Uniform(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>((Next() >> 11) % span);
}

Tensor GenTensor(std::uint64_t seed, int c, int h, int w, Precision p) {
  Tensor t(c, h, w, p);
  Xorshift64Star rng(seed);
  for (auto& v : t.values) {
    v = static_cast<std::int16_t>(rng.Uniform(OperandMin(p), OperandMax(p)));
  }
  return t;
}

WeightTensor GenWeights(std::uint64_t seed, int cout, int cin, int k,
                        Precision p) {
  WeightTensor t(cout, cin, k, p);
  Xorshift64Star rng(seed);
  for (auto& v : t.values) {
    v = static_cast<std::int16_t>(rng.Uniform(OperandMin(p), OperandMax(p)));
  }
  return t;
}

std::vector<Accumulator> Conv2dAcc(const Tensor& in, const WeightTensor& wt,
                                   const LayerSpec& l) {
  l.Validate();
  if (in.c != l.cin || in.h != l.h || in.w != l.w) {
    throw Error(ErrorCode::kShapeMismatch,
                "input tensor does not match layer " + l.name);
  }
  if (wt.cout != l.cout || wt.cin != l.cin || wt.k != l.k) {
    throw Error(ErrorCode::kShapeMismatch,
                "weight tensor does not match layer " + l.name);
  }
  const int oh = l.oh();
  const int ow = l.ow();
  std::vector<Accumulator> out(static_cast<std::size_t>(l.cout) * oh * ow, 0);
  for (int o = 0; o < l.cout; ++o) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        Accumulator acc = 0;
        for (int i = 0; i < l.cin; ++i) {
          for (int ky = 0; ky < l.k; ++ky) {
            const int y = oy * l.stride + ky - l.pad;
            if (y < 0 || y >= l.h) continue;
            for (int kx = 0; kx < l.k; ++kx) {
              const int x = ox * l.stride + kx - l.pad;
              if (x < 0 || x >= l.w) continue;
              acc = WrapAdd(acc, std::int64_t{in.at(i, y, x)} * wt.at(o, i, ky, kx));
            }
          }
        }
        out[(static_cast<std::size_t>(o) * oh + oy) * ow + ox] = acc;
      }
    }
  }
  return out;
}

Tensor Conv2dRef(const Tensor& in, const WeightTensor& wt, const LayerSpec& l,
                 unsigned shift) {
  const auto acc = Conv2dAcc(in, wt, l);
  Tensor out(l.cout, l.oh(), l.ow(), l.precision);
  for (std::size_t i = 0; i < acc.size(); ++i) {
    out.values[i] = static_cast<std::int16_t>(Requantize(acc[i], l.precision, shift));
  }
  return out;
}

namespace {

constexpr char kMagic[4] = {'S', 'P', 'D', 'T'};

std::uint8_t PrecisionCode(Precision p) { return static_cast<std::uint8_t>(p); }

}  // namespace

std::vector<std::uint8_t> SerializeTensor(const Tensor& t) {
  std::vector<std::uint8_t> b(16 + t.values.size() * 2, 0);
  std::memcpy(b.data(), kMagic, 4);
  const auto c = static_cast<std::uint32_t>(t.c);
  for (int i = 0; i < 4; ++i) b[4 + i] = static_cast<std::uint8_t>(c >> (8 * i));
  b[8] = static_cast<std::uint8_t>(t.h);
  b[9] = static_cast<std::uint8_t>(t.h >> 8);
  b[10] = static_cast<std::uint8_t>(t.w);
  b[11] = static_cast<std::uint8_t>(t.w >> 8);
  b[12] = PrecisionCode(t.precision);
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    const auto v = static_cast<std::uint16_t>(t.values[i]);
    b[16 + 2 * i] = static_cast<std::uint8_t>(v);
    b[17 + 2 * i] = static_cast<std::uint8_t>(v >> 8);
  }
  return b;
}

Tensor DeserializeTensor(const std::vector<std::uint8_t>& b) {
  if (b.size() < 16 || std::memcmp(b.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kIoError, "not a tensor file (bad magic)");
  }
  std::uint32_t c = 0;
  for (int i = 3; i >= 0; --i) c = (c << 8) | b[4 + i];
  const int h = b[8] | (b[9] << 8);
  const int w = b[10] | (b[11] << 8);
  if (b[12] > 2 || b[13] || b[14] || b[15]) {
    throw Error(ErrorCode::kIoError, "bad tensor header");
  }
  Tensor t(static_cast<int>(c), h, w, static_cast<Precision>(b[12]));
  if (b.size() != 16 + t.values.size() * 2) {
    throw Error(ErrorCode::kIoError, "tensor payload size does not match header");
  }
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    t.values[i] = static_cast<std::int16_t>(b[16 + 2 * i] | (b[17 + 2 * i] << 8));
  }
  t.CheckRange();
  return t;
}

void SaveTensor(const Tensor& t, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  const auto b = SerializeTensor(t);
  f.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  if (!f) throw Error(ErrorCode::kIoError, "cannot write " + path);
}

Tensor LoadTensor(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::vector<std::uint8_t> b((std::istreambuf_iterator<char>(f)),
                              std::istreambuf_iterator<char>());
  return DeserializeTensor(b);
}

}  // namespace speed
