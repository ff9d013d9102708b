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

#include "rawaug/isp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "rawaug/blur_kernel.hpp"  // reflect_index
#include "rawaug/error.hpp"
#include "rawaug/parallel.hpp"

namespace rawaug {
namespace {

using nlohmann::json;

}  // namespace

void validate_curve(const ToneCurve& curve) {
  if (!(curve.gamma > 0.0)) throw DataError("tone curve gamma must be > 0");
  if (!(curve.knee >= 0.0)) throw DataError("tone curve knee must be >= 0");
  if (!(curve.scale > 0.0)) throw DataError("tone curve scale must be > 0");
}

ToneCurve parse_tone_curve(const std::string& text) {
  json j;
  std::string body = text;
  if (body.find('{') == std::string::npos) {
    std::ifstream in(body);
    if (!in) throw DataError("missing tone curve file: " + body);
    body.assign((std::istreambuf_iterator<char>(in)),
                std::istreambuf_iterator<char>());
  }
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw DataError("malformed tone curve: " + std::string(e.what()));
  }
  ToneCurve curve;
  try {
    std::string variant = j.value("variant", std::string("simplest"));
    if (variant == "simplest") {
      curve.kind = ToneCurveKind::kSimplest;
    } else if (variant == "parameterized") {
      curve.kind = ToneCurveKind::kParameterized;
    } else {
      throw DataError("unknown tone curve variant: " + variant);
    }
    curve.gamma = j.value("gamma", curve.gamma);
    curve.knee = j.value("knee", curve.knee);
    curve.scale = j.value("scale", curve.scale);
  } catch (const json::exception& e) {
    throw DataError("bad tone curve field: " + std::string(e.what()));
  }
  validate_curve(curve);
  return curve;
}

double tone_map(double x, const ToneCurve& curve) {
  if (!(x >= 0.0) || x > 1.0)
    throw DataError("tone map input outside [0, 1]");
  double t = std::pow(x, 1.0 / curve.gamma);
  if (curve.kind == ToneCurveKind::kSimplest) return t;
  double y = curve.scale * (1.0 + curve.knee) * t / (1.0 + curve.knee * t);
  return std::clamp(y, 0.0, 1.0);
}

RgbImageF demosaic_bilinear(const RawFrame& frame) {
  validate_frame(frame);
  if (!frame.normalized)
    throw DataError("demosaic expects a normalized frame");
  RgbImageF image;
  image.width = frame.width;
  image.height = frame.height;
  image.pixels.assign(std::size_t(3) * frame.pixel_count(), 0.0);
  for (int r = 0; r < frame.height; ++r) {
    for (int c = 0; c < frame.width; ++c) {
      double* out = &image.pixels[(std::size_t(r) * frame.width + c) * 3];
      int own = cfa_color_at(frame.cfa, r, c);
      out[own] = frame.at(r, c);
      for (int ch = 0; ch < 3; ++ch) {
        if (ch == own) continue;
        double sum = 0.0;
        int count = 0;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            if (cfa_color_at(frame.cfa, r + dr + 2, c + dc + 2) != ch)
              continue;  // +2 keeps the parity query in range for r,c = 0
            int rr = reflect_index(r + dr, frame.height);
            int cc = reflect_index(c + dc, frame.width);
            sum += frame.at(rr, cc);
            ++count;
          }
        }
        out[ch] = sum / double(count);
      }
    }
  }
  return image;
}

RgbImage8 develop(const RawFrame& frame, const ToneCurve& curve,
                  unsigned threads) {
  validate_curve(curve);
  RawFrame normalized = normalize(frame);
  RgbImageF linear = demosaic_bilinear(normalized);
  RgbImage8 image;
  image.width = linear.width;
  image.height = linear.height;
  image.pixels.resize(linear.pixels.size());
  parallel_for(linear.pixels.size(), threads,
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t i = begin; i < end; ++i) {
                   double y = tone_map(linear.pixels[i], curve);
                   double q = round_half_even(y * 255.0);
                   image.pixels[i] =
                       std::uint8_t(std::clamp(q, 0.0, 255.0));
                 }
               });
  return image;
}

void write_ppm(const RgbImage8& image, const std::string& path) {
  if (image.width <= 0 || image.height <= 0 ||
      image.pixels.size() != std::size_t(3) * image.width * image.height)
    throw DataError("malformed image buffer");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            std::streamsize(image.pixels.size()));
  if (!out) throw DataError("short write: " + path);
}

}  // namespace rawaug
