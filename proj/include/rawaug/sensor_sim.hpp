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
#include <string>
#include <vector>

#include "rawaug/blur_kernel.hpp"
#include "rawaug/raw_frame.hpp"

namespace rawaug {

// Ground-truth sensor description used by the synthetic capture oracle.
struct SensorSpec {
  double alpha = 1.2;      // DN per photoelectron before gain
  double sigma_d2 = 6.0;   // pre-gain additive noise variance
  double sigma_r2 = 25.0;  // post-gain readout noise variance
  int bit_depth = 10;
  double black_level = 64.0;
  double white_level = 1023.0;
  CfaPattern cfa = CfaPattern::kRggb;
  bool quantize = true;  // round to integer DN like an ADC
};

void validate_sensor(const SensorSpec& spec);

// Expected photoelectron count per CFA site (the noise-free scene).
struct SceneMap {
  int width = 0;
  int height = 0;
  std::vector<double> mean_photons;  // row-major, >= 0

  double at(int row, int col) const {
    return mean_photons[std::size_t(row) * width + col];
  }
};

void validate_scene(const SceneMap& scene);

// Scene scaled by a non-negative illumination factor.
SceneMap scale_scene(const SceneMap& scene, double factor);

// 24-patch chart: 4 rows x 6 columns of patch_size x patch_size squares.
// Patch base levels are log-spaced over roughly [5, 2000] photoelectrons at
// unit illumination and each patch carries its own R/G/B attenuation, so the
// mosaic sees a wide spread of levels.  patch_size must be even and >= 8.
SceneMap color_checker_scene(int patch_size, double illumination);

// Same chart with caller-supplied base levels (24) and per-channel
// attenuations (24 x 3, each in (0, 1]).
SceneMap color_checker_scene(int patch_size, double illumination,
                             const std::vector<double>& base_levels,
                             const std::vector<std::array<double, 3>>& attenuation);

// One noisy exposure: per pixel, photons ~ Poisson(scene), then pre-gain
// Gaussian noise, amplification, readout noise, and black level.  When
// spec.quantize is set the ADC rounds and clips to [0, 2^bit_depth - 1];
// otherwise the continuous signal passes through untouched.  Every pixel
// draws from its own counter stream keyed by stream_key, so results are
// identical for any thread count.
RawFrame capture(const SceneMap& scene, GainValue gain, const SensorSpec& spec,
                 std::uint64_t stream_key, unsigned threads = 1);

// n_frames independent captures; frame i uses the stream derived from
// (seed, i).  Metadata is identical across the burst.
Burst capture_burst(const SceneMap& scene, GainValue gain,
                    const SensorSpec& spec, int n_frames, std::uint64_t seed,
                    unsigned threads = 1);

// Physically blurred capture: the photon map itself is blurred (offsets in
// Bayer-quad steps, mirrored at borders), then captured once — photon noise
// is averaged by the motion while the readout chain fires once.
RawFrame capture_motion_blur(const SceneMap& scene, GainValue gain,
                             const SensorSpec& spec, const BlurKernel& kernel,
                             std::uint64_t stream_key, unsigned threads = 1);

// Scene files: <base>.f64 little-endian doubles plus <base>.json dimensions.
void save_scene(const SceneMap& scene, const std::string& path);
SceneMap load_scene(const std::string& path);

}  // namespace rawaug
