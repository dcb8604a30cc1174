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

#ifndef SPEED_TENSOR_H_
#define SPEED_TENSOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include "speed/isa.h"
#include "speed/layer.h"
#include "speed/sau.h"

namespace speed {

// Activation tensor, N = 1, CHW order.
struct Tensor {
  Tensor() = default;
  Tensor(int c, int h, int w, Precision p)
      : c(c), h(h), w(w), precision(p),
        values(static_cast<std::size_t>(c) * h * w, 0) {}

  std::int16_t& at(int ch, int y, int x) {
    return values[(static_cast<std::size_t>(ch) * h + y) * w + x];
  }
  std::int16_t at(int ch, int y, int x) const {
    return values[(static_cast<std::size_t>(ch) * h + y) * w + x];
  }
  // Throws Error(kFieldOverflow) if a value is outside the precision range.
  void CheckRange() const;

  int c = 0;
  int h = 0;
  int w = 0;
  Precision precision = Precision::kP16;
  std::vector<std::int16_t> values;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

// Kernels in OIHW order.
struct WeightTensor {
  WeightTensor() = default;
  WeightTensor(int cout, int cin, int k, Precision p)
      : cout(cout), cin(cin), k(k), precision(p),
        values(static_cast<std::size_t>(cout) * cin * k * k, 0) {}

  std::int16_t& at(int o, int i, int ky, int kx) {
    return values[((static_cast<std::size_t>(o) * cin + i) * k + ky) * k + kx];
  }
  std::int16_t at(int o, int i, int ky, int kx) const {
    return values[((static_cast<std::size_t>(o) * cin + i) * k + ky) * k + kx];
  }

  int cout = 0;
  int cin = 0;
  int k = 0;
  Precision precision = Precision::kP16;
  std::vector<std::int16_t> values;

  friend bool operator==(const WeightTensor&, const WeightTensor&) = default;
};

// xorshift64* seeded through splitmix64. Output is identical on every
// platform for a given seed.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed);
  std::uint64_t Next();
  // Uniform over [lo, hi].
  int Uniform(int lo, int hi);

 private:
  std::uint64_t state_;
};

Tensor GenTensor(std::uint64_t seed, int c, int h, int w, Precision p);
WeightTensor GenWeights(std::uint64_t seed, int cout, int cin, int k, Precision p);

// Raw 32-bit accumulators of the convolution, COHW order (oh x ow per channel).
std::vector<Accumulator> Conv2dAcc(const Tensor& input,
                                   const WeightTensor& weights,
                                   const LayerSpec& layer);

// Naive convolution with 32-bit wrapping accumulation, then Requantize to the
// layer precision. Throws Error(kShapeMismatch).
Tensor Conv2dRef(const Tensor& input, const WeightTensor& weights,
                 const LayerSpec& layer, unsigned shift);

// 16-byte header: "SPDT", c (u32), h (u16), w (u16), precision code (u8:
// 0 = 4-bit, 1 = 8-bit, 2 = 16-bit), 3 zero bytes; then int16 LE values.
std::vector<std::uint8_t> SerializeTensor(const Tensor& t);
Tensor DeserializeTensor(const std::vector<std::uint8_t>& bytes);
void SaveTensor(const Tensor& t, const std::string& path);
Tensor LoadTensor(const std::string& path);

}  // namespace speed

#endif  // SPEED_TENSOR_H_
