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

#include "rawaug/sensor_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "rawaug/error.hpp"
#include "rawaug/parallel.hpp"
#include "rawaug/rng.hpp"

namespace rawaug {
namespace {

using nlohmann::json;

// Chart attenuation triplets (R, G, B).  Chosen for variety — saturated
// primaries, pastels, and neutrals — so each patch exposes up to three
// distinct levels to the mosaic.
constexpr std::array<std::array<double, 3>, 24> kChartAttenuation = {{
    {1.00, 0.55, 0.30}, {0.45, 1.00, 0.40}, {0.35, 0.50, 1.00},
    {0.95, 0.90, 0.25}, {0.90, 0.35, 0.85}, {0.30, 0.95, 0.90},
    {1.00, 1.00, 1.00}, {0.70, 0.70, 0.70}, {0.95, 0.60, 0.50},
    {0.50, 0.80, 0.95}, {0.85, 0.95, 0.45}, {0.60, 0.45, 0.90},
    {1.00, 0.40, 0.40}, {0.40, 1.00, 0.55}, {0.45, 0.55, 0.95},
    {0.90, 0.75, 0.60}, {0.65, 0.90, 0.80}, {0.80, 0.60, 0.95},
    {1.00, 0.95, 0.90}, {0.55, 0.50, 0.45}, {0.75, 1.00, 0.65},
    {0.50, 0.65, 0.80}, {0.95, 0.50, 0.75}, {0.85, 0.85, 0.35},
}};

std::vector<double> default_base_levels() {
  // 24 levels log-spaced over [5, 2000] photoelectrons.
  std::vector<double> levels(24);
  for (int i = 0; i < 24; ++i)
    levels[i] = 5.0 * std::pow(2000.0 / 5.0, double(i) / 23.0);
  return levels;
}

double clip_dn(double x, const SensorSpec& spec) {
  double dn_max = double((1u << spec.bit_depth) - 1u);
  return std::clamp(x, 0.0, dn_max);
}

// One pixel of the capture chain.  Draw order (photons, pre-gain noise,
// readout noise) is fixed so a pixel's value depends only on its stream.
double expose_pixel(double mean_photons, double g, const SensorSpec& spec,
                    CounterRng& rng) {
  double u = double(rng.next_poisson(mean_photons));
  double pre = spec.sigma_d2 > 0.0
                   ? std::sqrt(spec.sigma_d2) * rng.next_gaussian()
                   : 0.0;
  double post = spec.sigma_r2 > 0.0
                    ? std::sqrt(spec.sigma_r2) * rng.next_gaussian()
                    : 0.0;
  double x = g * (spec.alpha * u + pre) + post + spec.black_level;
  // Quantization and ADC clipping travel together; disabling both yields the
  // continuous signal useful for distributional checks.
  if (spec.quantize) x = clip_dn(round_half_even(x), spec);
  return x;
}

RawFrame frame_shell(const SceneMap& scene, GainValue gain,
                     const SensorSpec& spec) {
  RawFrame frame;
  frame.width = scene.width;
  frame.height = scene.height;
  frame.cfa = spec.cfa;
  frame.bit_depth = spec.bit_depth;
  frame.black_level = spec.black_level;
  frame.white_level = spec.white_level;
  frame.gain_db = gain.db;
  frame.normalized = false;
  frame.pixels.assign(std::size_t(scene.width) * scene.height, 0.0);
  return frame;
}

constexpr std::uint64_t kMotionBlurSalt = 0x4D4F424Cull;  // "MOBL"

}  // namespace

void validate_sensor(const SensorSpec& spec) {
  if (!(spec.alpha > 0.0)) throw DataError("sensor alpha must be positive");
  if (!(spec.sigma_d2 >= 0.0) || !(spec.sigma_r2 >= 0.0))
    throw DataError("sensor noise variances must be non-negative");
  if (spec.bit_depth < 8 || spec.bit_depth > 16)
    throw DataError("sensor bit depth out of range [8, 16]");
  double dn_max = double((1u << spec.bit_depth) - 1u);
  if (!(spec.black_level >= 0.0) || !(spec.black_level < spec.white_level) ||
      spec.white_level > dn_max)
    throw DataError("sensor black/white levels are inconsistent");
}

void validate_scene(const SceneMap& scene) {
  if (scene.width <= 0 || scene.height <= 0 || scene.width % 2 != 0 ||
      scene.height % 2 != 0)
    throw DataError("scene dimensions must be positive and even");
  if (scene.mean_photons.size() != std::size_t(scene.width) * scene.height)
    throw DataError("scene buffer size does not match dimensions");
  for (double v : scene.mean_photons)
    if (!(v >= 0.0)) throw DataError("scene photon means must be >= 0");
}

SceneMap scale_scene(const SceneMap& scene, double factor) {
  validate_scene(scene);
  if (!(factor >= 0.0)) throw DataError("illumination factor must be >= 0");
  SceneMap out = scene;
  for (double& v : out.mean_photons) v *= factor;
  return out;
}

SceneMap color_checker_scene(int patch_size, double illumination,
                             const std::vector<double>& base_levels,
                             const std::vector<std::array<double, 3>>& attenuation) {
  if (patch_size < 8 || patch_size % 2 != 0)
    throw DataError("patch size must be even and >= 8");
  if (base_levels.size() != 24 || attenuation.size() != 24)
    throw DataError("chart needs 24 base levels and 24 attenuation triplets");
  if (!(illumination >= 0.0)) throw DataError("illumination must be >= 0");
  for (double b : base_levels)
    if (!(b >= 0.0)) throw DataError("chart base levels must be >= 0");
  for (const auto& a : attenuation)
    for (double c : a)
      if (!(c > 0.0) || c > 1.0)
        throw DataError("chart attenuations must lie in (0, 1]");

  SceneMap scene;
  scene.width = 6 * patch_size;
  scene.height = 4 * patch_size;
  scene.mean_photons.resize(std::size_t(scene.width) * scene.height);
  for (int r = 0; r < scene.height; ++r) {
    for (int c = 0; c < scene.width; ++c) {
      int patch = (r / patch_size) * 6 + (c / patch_size);
      int color = cfa_color_at(CfaPattern::kRggb, r, c);
      scene.mean_photons[std::size_t(r) * scene.width + c] =
          illumination * base_levels[patch] * attenuation[patch][color];
    }
  }
  return scene;
}

SceneMap color_checker_scene(int patch_size, double illumination) {
  return color_checker_scene(
      patch_size, illumination, default_base_levels(),
      {kChartAttenuation.begin(), kChartAttenuation.end()});
}

RawFrame capture(const SceneMap& scene, GainValue gain, const SensorSpec& spec,
                 std::uint64_t stream_key, unsigned threads) {
  validate_scene(scene);
  validate_sensor(spec);
  RawFrame frame = frame_shell(scene, gain, spec);
  double g = gain.linear();
  double* out = frame.pixels.data();
  const double* mean = scene.mean_photons.data();
  parallel_for(frame.pixel_count(), threads,
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t i = begin; i < end; ++i) {
                   CounterRng rng(stream_key, i);
                   out[i] = expose_pixel(mean[i], g, spec, rng);
                 }
               });
  return frame;
}

Burst capture_burst(const SceneMap& scene, GainValue gain,
                    const SensorSpec& spec, int n_frames, std::uint64_t seed,
                    unsigned threads) {
  if (n_frames < 2) throw DataError("burst needs at least two frames");
  Burst burst;
  burst.frames.reserve(std::size_t(n_frames));
  for (int i = 0; i < n_frames; ++i)
    burst.frames.push_back(
        capture(scene, gain, spec, derive_stream(seed, std::uint64_t(i)), threads));
  return burst;
}

RawFrame capture_motion_blur(const SceneMap& scene, GainValue gain,
                             const SensorSpec& spec, const BlurKernel& kernel,
                             std::uint64_t stream_key, unsigned threads) {
  validate_scene(scene);
  validate_kernel(kernel);
  // Blur the photon map: motion averages the light itself.
  SceneMap blurred = scene;
  for (int r = 0; r < scene.height; ++r) {
    for (int c = 0; c < scene.width; ++c) {
      double acc = 0.0;
      for (const BlurTap& tap : kernel.taps) {
        int rr = reflect_index(r + 2 * tap.drow, scene.height);
        int cc = reflect_index(c + 2 * tap.dcol, scene.width);
        acc += tap.weight * scene.at(rr, cc);
      }
      blurred.mean_photons[std::size_t(r) * scene.width + c] = acc;
    }
  }
  return capture(blurred, gain, spec, derive_stream(stream_key, kMotionBlurSalt),
                 threads);
}

void save_scene(const SceneMap& scene, const std::string& path) {
  validate_scene(scene);
  std::ofstream raw(path + ".f64", std::ios::binary | std::ios::trunc);
  if (!raw) throw DataError("cannot open for writing: " + path + ".f64");
  for (double v : scene.mean_photons) {
    static_assert(sizeof(double) == 8);
    unsigned char bytes[8];
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int b = 0; b < 8; ++b) bytes[b] = (unsigned char)(bits >> (8 * b));
    raw.write(reinterpret_cast<const char*>(bytes), 8);
  }
  if (!raw) throw DataError("short write: " + path + ".f64");
  json meta = {{"width", scene.width}, {"height", scene.height}};
  std::ofstream side(path + ".json", std::ios::trunc);
  if (!side) throw DataError("cannot open for writing: " + path + ".json");
  side << meta.dump(2) << "\n";
}

SceneMap load_scene(const std::string& path) {
  std::ifstream side(path + ".json");
  if (!side) throw DataError("missing scene sidecar: " + path + ".json");
  json meta;
  try {
    side >> meta;
  } catch (const json::exception& e) {
    throw DataError("malformed scene sidecar: " + std::string(e.what()));
  }
  SceneMap scene;
  scene.width = meta.at("width").get<int>();
  scene.height = meta.at("height").get<int>();
  std::ifstream raw(path + ".f64", std::ios::binary);
  if (!raw) throw DataError("missing scene payload: " + path + ".f64");
  std::vector<char> bytes((std::istreambuf_iterator<char>(raw)),
                          std::istreambuf_iterator<char>());
  if (scene.width <= 0 || scene.height <= 0 ||
      bytes.size() != std::size_t(scene.width) * scene.height * 8)
    throw DataError("scene payload size mismatch: " + path);
  scene.mean_photons.resize(bytes.size() / 8);
  for (std::size_t i = 0; i < scene.mean_photons.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b)
      bits = (bits << 8) | std::uint64_t(std::uint8_t(bytes[8 * i + b]));
    std::memcpy(&scene.mean_photons[i], &bits, 8);
  }
  validate_scene(scene);
  return scene;
}

}  // namespace rawaug
