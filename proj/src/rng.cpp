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

#include "rawaug/rng.hpp"

#include <cmath>

#include "rawaug/error.hpp"

namespace rawaug {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& c,
                         const std::array<std::uint32_t, 2>& k) {
  std::uint64_t p0 = std::uint64_t(kPhiloxM0) * c[0];
  std::uint64_t p1 = std::uint64_t(kPhiloxM1) * c[2];
  std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
  std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    philox_round(counter, key);
  }
  return counter;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t salt) {
  return mix64(parent ^ mix64(salt));
}

CounterRng::CounterRng(std::uint64_t key, std::uint64_t stream)
    : key_{std::uint32_t(key), std::uint32_t(key >> 32)},
      stream_{std::uint32_t(stream), std::uint32_t(stream >> 32)} {}

std::uint32_t CounterRng::next_u32() {
  if (cursor_ == 4) {
    block_ = philox4x32({std::uint32_t(position_), std::uint32_t(position_ >> 32),
                         stream_[0], stream_[1]},
                        key_);
    ++position_;
    cursor_ = 0;
  }
  return block_[cursor_++];
}

std::uint64_t CounterRng::next_u64() {
  std::uint64_t lo = next_u32();
  std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double CounterRng::next_unit() {
  // (mantissa + 0.5) / 2^53 stays strictly inside (0, 1).
  return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_gaussian() {
  double u1 = next_unit();
  double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::uint64_t CounterRng::next_poisson(double mean) {
  if (!(mean >= 0.0)) throw DataError("poisson mean must be >= 0");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    // Product-of-uniforms method; expected draw count is mean + 1.
    double limit = std::exp(-mean);
    double prod = 1.0;
    std::uint64_t k = 0;
    do {
      ++k;
      prod *= next_unit();
    } while (prod > limit);
    return k - 1;
  }
  // Hoermann's PTRS transformed rejection, valid for mean >= 10.
  double slam = std::sqrt(mean);
  double loglam = std::log(mean);
  double b = 0.931 + 2.53 * slam;
  double a = -0.059 + 0.02483 * b;
  double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = next_unit() - 0.5;
    double v = next_unit();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return std::uint64_t(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        kf * loglam - mean - std::lgamma(kf + 1.0)) {
      return std::uint64_t(kf);
    }
  }
}

}  // namespace rawaug
