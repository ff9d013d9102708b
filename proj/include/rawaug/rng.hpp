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

#include <array>
#include <cstdint>

namespace rawaug {

// Philox4x32 with 10 rounds (Salmon et al., SC'11).  A pure function of
// (counter, key): the natural primitive for per-pixel noise streams whose
// output cannot depend on thread scheduling.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// SplitMix64 finalizer.  Never returns its argument unmixed.
std::uint64_t mix64(std::uint64_t x);

// Child stream id for (parent, salt); distinct salts give independent streams.
std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t salt);

// One logical random stream addressed by (key, stream).  Every draw is a pure
// function of (key, stream, position within the stream), so two CounterRng
// instances constructed alike replay the same sequence, and streams with
// different ids never overlap: the id occupies its own counter words.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key, std::uint64_t stream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1) with 53-bit resolution.
  double next_unit();

  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double next_gaussian();

  // Poisson with the given mean (>= 0).  Product method below mean 10,
  // Hoermann's PTRS transformed rejection above.
  std::uint64_t next_poisson(double mean);

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 2> stream_;
  std::uint64_t position_ = 0;
  std::array<std::uint32_t, 4> block_{};
  unsigned cursor_ = 4;
};

}  // namespace rawaug
