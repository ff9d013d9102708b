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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace rawaug {

// 2x2 Bayer mosaic phase.  Letters name the colors of the top-left quad in
// row-major order.
enum class CfaPattern { kRggb, kBggr, kGrbg, kGbrg };

CfaPattern cfa_from_string(const std::string& name);
std::string cfa_to_string(CfaPattern cfa);

// Color of the CFA site at (row, col): 0 = R, 1 = G, 2 = B.
int cfa_color_at(CfaPattern cfa, int row, int col);

// Analog gain stored in decibels; linear factor is 10^(db/20).
struct GainValue {
  double db = 0.0;
  double linear() const;
  static GainValue from_linear(double g);
};

// Single mosaiced frame.  Pixel values are doubles so intermediate math never
// quantizes; integer DN appear only at file I/O.  Values are raw DN including
// the black level unless `normalized` is set, in which case they live in
// [0, 1] with the black level already mapped to 0.
struct RawFrame {
  int width = 0;
  int height = 0;
  CfaPattern cfa = CfaPattern::kRggb;
  int bit_depth = 10;
  double black_level = 0.0;
  double white_level = 1023.0;
  double gain_db = 0.0;
  bool normalized = false;
  std::vector<double> pixels;  // row-major, width*height

  double& at(int row, int col) { return pixels[std::size_t(row) * width + col]; }
  double at(int row, int col) const { return pixels[std::size_t(row) * width + col]; }
  std::size_t pixel_count() const { return pixels.size(); }
};

// Checks the frame contract: positive even dimensions, pixel count, bit depth
// in [8, 16], black_level < white_level <= 2^bit_depth - 1.  DataError on
// violation.
void validate_frame(const RawFrame& frame);

// Convenience constructor that validates.  Pixels default to black_level.
RawFrame make_frame(int width, int height, CfaPattern cfa, int bit_depth,
                    double black_level, double white_level, double gain_db,
                    std::vector<double> pixels = {});

// Affine map of [black_level, white_level] onto [0, 1], clamped.  Metadata is
// updated so a second call is a no-op.
RawFrame normalize(const RawFrame& frame);

// Mask with 1 at sites of the requested color (0 = R, 1 = G, 2 = B).  The
// three masks partition the frame.
std::vector<std::uint8_t> channel_mask(const RawFrame& frame, int color);
std::vector<std::uint8_t> channel_mask(int width, int height, CfaPattern cfa,
                                       int color);

// Temporal stack of frames with identical metadata; at least two frames.
struct Burst {
  std::vector<RawFrame> frames;
};

void validate_burst(const Burst& burst);

// Round-half-to-even, the rounding used everywhere a real value becomes DN.
double round_half_even(double x);

}  // namespace rawaug
