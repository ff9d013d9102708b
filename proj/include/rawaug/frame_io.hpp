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

#include <string>

#include "rawaug/raw_frame.hpp"

namespace rawaug {

// On-disk frame format: <base>.raw16 holds the row-major little-endian u16
// payload, <base>.json the metadata sidecar (width, height, cfa, bit_depth,
// black_level, white_level, gain_db, normalized).  `path` may be given with
// or without the .raw16 extension.
//
// save rounds half-to-even and fails on values outside [0, 2^bit_depth - 1]
// after rounding; load fails on a missing sidecar, payload size mismatch,
// odd dimensions, or stored values above the bit-depth limit.
void save_frame(const RawFrame& frame, const std::string& path);
RawFrame load_frame(const std::string& path);

// Bursts are directories of frame_0000.raw16 / frame_0000.json, indexed
// consecutively from zero.  Loading checks the Burst contract.
void save_burst(const Burst& burst, const std::string& dir);
Burst load_burst(const std::string& dir);

}  // namespace rawaug
