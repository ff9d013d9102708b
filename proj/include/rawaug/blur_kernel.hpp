// Copyright 2026 The rawaug Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <vector>

#include "rawaug/error.hpp"

namespace rawaug {

// One blur tap.  Offsets are in Bayer-quad steps: a step of 1 moves two
// pixels, so every tap lands on a site of the same CFA color.
struct BlurTap {
  int drow = 0;
  int dcol = 0;
  double weight = 1.0;
};

struct BlurKernel {
  std::vector<BlurTap> taps;

  // Single tap at the origin with weight 1: a no-op.
  static BlurKernel identity() { return BlurKernel{{BlurTap{0, 0, 1.0}}}; }

  // 1-D uniform kernel of length 2*distance + 1 centered on the origin,
  // horizontal or vertical.  distance 0 is the identity.
  static BlurKernel uniform_line(int distance, bool horizontal) {
    if (distance < 0) throw DataError("blur distance must be >= 0");
    BlurKernel kernel;
    double w = 1.0 / double(2 * distance + 1);
    for (int k = -distance; k <= distance; ++k)
      kernel.taps.push_back(horizontal ? BlurTap{0, k, w} : BlurTap{k, 0, w});
    return kernel;
  }

  bool is_identity() const {
    return taps.size() == 1 && taps[0].drow == 0 && taps[0].dcol == 0 &&
           taps[0].weight == 1.0;
  }

  double weight_square_sum() const {
    double s = 0.0;
    for (const BlurTap& t : taps) s += t.weight * t.weight;
    return s;
  }
};

// Kernel contract: at least one tap, unique offsets, weights in [0, 1]
// summing to 1 within 1e-9.  DataError on violation.
inline void validate_kernel(const BlurKernel& kernel) {
  if (kernel.taps.empty()) throw DataError("blur kernel needs at least one tap");
  double sum = 0.0;
  for (std::size_t i = 0; i < kernel.taps.size(); ++i) {
    const BlurTap& t = kernel.taps[i];
    if (!(t.weight >= 0.0) || t.weight > 1.0)
      throw DataError("blur weights must lie in [0, 1]");
    sum += t.weight;
    for (std::size_t j = i + 1; j < kernel.taps.size(); ++j)
      if (kernel.taps[j].drow == t.drow && kernel.taps[j].dcol == t.dcol)
        throw DataError("blur kernel has duplicate tap offsets");
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw DataError("blur weights must sum to 1");
}

// Mirror index into [0, n) without repeating the edge sample.  For the even
// dimensions used here the reflection preserves index parity, so reflected
// CFA sites keep their color.
inline int reflect_index(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

}  // namespace rawaug
