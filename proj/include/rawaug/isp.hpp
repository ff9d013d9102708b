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

#include <cstdint>
#include <string>
#include <vector>

#include "rawaug/raw_frame.hpp"

namespace rawaug {

enum class ToneCurveKind { kSimplest, kParameterized };

// Display transfer curve on [0, 1]: y = x^(1/gamma), optionally reshaped by a
// knee and output scale; monotone with curve(0) = 0 by construction.
struct ToneCurve {
  ToneCurveKind kind = ToneCurveKind::kSimplest;
  double gamma = 5.0;
  double knee = 0.0;
  double scale = 1.0;
};

void validate_curve(const ToneCurve& curve);

// Accepts an inline JSON object ({"variant":"simplest","gamma":5}) or a path
// to a file holding one.
ToneCurve parse_tone_curve(const std::string& text);

double tone_map(double x, const ToneCurve& curve);

// Full-resolution interpolated color planes, interleaved RGB, linear domain.
struct RgbImageF {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;  // 3 * width * height
};

// 8-bit display-referred image, interleaved RGB.
struct RgbImage8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

// Bilinear interpolation: keep the site's own color, average same-color
// neighbors in the 3x3 window otherwise; mirrored borders.
RgbImageF demosaic_bilinear(const RawFrame& frame);

// normalize -> demosaic -> tone map -> half-to-even quantization to 8 bits.
RgbImage8 develop(const RawFrame& frame, const ToneCurve& curve,
                  unsigned threads = 1);

// Binary PPM (P6), bit-exact by construction.
void write_ppm(const RgbImage8& image, const std::string& path);

}  // namespace rawaug

