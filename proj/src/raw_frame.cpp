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

#include "rawaug/raw_frame.hpp"

#include <algorithm>
#include <cmath>

#include "rawaug/error.hpp"

namespace rawaug {

CfaPattern cfa_from_string(const std::string& name) {
  if (name == "RGGB") return CfaPattern::kRggb;
  if (name == "BGGR") return CfaPattern::kBggr;
  if (name == "GRBG") return CfaPattern::kGrbg;
  if (name == "GBRG") return CfaPattern::kGbrg;
  throw DataError("unknown CFA pattern: " + name);
}

std::string cfa_to_string(CfaPattern cfa) {
  switch (cfa) {
    case CfaPattern::kRggb: return "RGGB";
    case CfaPattern::kBggr: return "BGGR";
    case CfaPattern::kGrbg: return "GRBG";
    case CfaPattern::kGbrg: return "GBRG";
  }
  throw DataError("invalid CFA enum value");
}

int cfa_color_at(CfaPattern cfa, int row, int col) {
  // Color of each quad position, row-major: {(0,0), (0,1), (1,0), (1,1)}.
  static constexpr int kQuad[4][4] = {
      {0, 1, 1, 2},  // RGGB
      {2, 1, 1, 0},  // BGGR
      {1, 0, 2, 1},  // GRBG
      {1, 2, 0, 1},  // GBRG
  };
  return kQuad[int(cfa)][(row & 1) * 2 + (col & 1)];
}

double GainValue::linear() const { return std::pow(10.0, db / 20.0); }

GainValue GainValue::from_linear(double g) {
  if (!(g > 0.0)) throw DataError("linear gain must be positive");
  return GainValue{20.0 * std::log10(g)};
}

void validate_frame(const RawFrame& frame) {
  if (frame.width <= 0 || frame.height <= 0)
    throw DataError("frame dimensions must be positive");
  if (frame.width % 2 != 0 || frame.height % 2 != 0)
    throw DataError("frame dimensions must be even for a 2x2 CFA");
  if (frame.pixels.size() != std::size_t(frame.width) * std::size_t(frame.height))
    throw DataError("pixel buffer size does not match dimensions");
  if (frame.bit_depth < 8 || frame.bit_depth > 16)
    throw DataError("bit depth out of range [8, 16]");
  double dn_max = double((1u << frame.bit_depth) - 1u);
  if (!(frame.black_level < frame.white_level))
    throw DataError("black level must be below white level");
  if (!frame.normalized && frame.white_level > dn_max)
    throw DataError("white level exceeds bit depth range");
}

RawFrame make_frame(int width, int height, CfaPattern cfa, int bit_depth,
                    double black_level, double white_level, double gain_db,
                    std::vector<double> pixels) {
  RawFrame frame;
  frame.width = width;
  frame.height = height;
  frame.cfa = cfa;
  frame.bit_depth = bit_depth;
  frame.black_level = black_level;
  frame.white_level = white_level;
  frame.gain_db = gain_db;
  if (pixels.empty())
    pixels.assign(std::size_t(width) * std::size_t(height), black_level);
  frame.pixels = std::move(pixels);
  validate_frame(frame);
  return frame;
}

RawFrame normalize(const RawFrame& frame) {
  validate_frame(frame);
  RawFrame out = frame;
  double span = frame.white_level - frame.black_level;
  for (double& p : out.pixels)
    p = std::clamp((p - frame.black_level) / span, 0.0, 1.0);
  out.black_level = 0.0;
  out.white_level = 1.0;
  out.normalized = true;
  return out;
}

std::vector<std::uint8_t> channel_mask(int width, int height, CfaPattern cfa,
                                       int color) {
  if (color < 0 || color > 2) throw DataError("channel color must be 0, 1, or 2");
  std::vector<std::uint8_t> mask(std::size_t(width) * std::size_t(height));
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      mask[std::size_t(r) * width + c] = cfa_color_at(cfa, r, c) == color ? 1 : 0;
  return mask;
}

std::vector<std::uint8_t> channel_mask(const RawFrame& frame, int color) {
  return channel_mask(frame.width, frame.height, frame.cfa, color);
}

void validate_burst(const Burst& burst) {
  if (burst.frames.size() < 2)
    throw DataError("burst needs at least two frames");
  const RawFrame& head = burst.frames.front();
  validate_frame(head);
  for (const RawFrame& f : burst.frames) {
    validate_frame(f);
    if (f.width != head.width || f.height != head.height || f.cfa != head.cfa ||
        f.bit_depth != head.bit_depth || f.black_level != head.black_level ||
        f.white_level != head.white_level || f.gain_db != head.gain_db ||
        f.normalized != head.normalized) {
      throw DataError("burst frames must share identical metadata");
    }
  }
}

double round_half_even(double x) {
  // remainder(x, 1) is x minus the nearest integer with ties to even.
  return x - std::remainder(x, 1.0);
}

}  // namespace rawaug
