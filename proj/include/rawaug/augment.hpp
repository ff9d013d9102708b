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
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rawaug/blur_kernel.hpp"
#include "rawaug/noise_model.hpp"
#include "rawaug/raw_frame.hpp"

namespace rawaug {

class CounterRng;

// Sampling ranges and probabilities for the stochastic transform draw.
struct AugmentConfig {
  double contrast_min = 0.01;
  double contrast_max = 1.0;
  double hue_prob = 0.5;
  double hue_min = 0.8;  // per-channel factor relative to the base contrast
  double hue_max = 1.2;
  double brightness_min = -0.1;  // relative to the frame minimum
  double brightness_max = 0.1;
  // Gain-attribution factor range; sampled log-uniform once per frame.
  double p_g_min = 1.0;
  double p_g_max = 1.0;
  double blur_prob = 0.5;
  int blur_max_distance = 13;  // Bayer-quad steps
  double geometric_prob = 0.8;
  double shift_max_fraction = 0.1;  // of each dimension
  double scale_min = 0.97;
  double scale_max = 1.03;
};

void validate_augment_config(const AugmentConfig& config);
AugmentConfig load_augment_config(const std::string& path);

// One concrete draw: fully determines the transform together with `seed`.
struct AugmentSpec {
  double p_c_base = 1.0;
  std::array<double, 3> p_c = {1.0, 1.0, 1.0};  // per channel (R, G, B)
  bool hue_applied = false;
  double p_b_hat = 0.0;  // brightness shift as a fraction of the frame minimum
  double p_g = 1.0;      // share of the factor attributed to analog gain
  bool blur_applied = false;
  BlurKernel blur = BlurKernel::identity();
  bool geometric_applied = false;
  int shift_x = 0;  // pixels; whole Bayer quads (even)
  int shift_y = 0;
  double scale = 1.0;
  std::uint64_t seed = 0;

  bool identity() const;
};

// Frame dimensions bound the shift draw to whole quads within 10% of size.
AugmentSpec sample_spec(const AugmentConfig& config, int width, int height,
                        CounterRng& rng);

// Bookkeeping over one operator application.
struct AugmentStats {
  std::size_t clipped_variance_pixels = 0;  // negative target variance, set to 0
  std::size_t saturated_pixels = 0;         // clamped at the white level
  std::size_t total_pixels = 0;
};

// Scales the (black-subtracted) signal by p_u*p_g and adds the correction
// noise that makes the output statistics match the target condition, given
// the noise already present in the input.  The output carries the target
// gain (p_g times the input gain), so conversions compose.
RawFrame exposure_gain_shift(const RawFrame& frame, const NoiseModel& model,
                             double p_u, double p_g, std::uint64_t stream_key,
                             AugmentStats* stats = nullptr,
                             unsigned threads = 1);

// Per-channel contrast/brightness with the same correction-noise treatment;
// the combined factor is split into (illumination, gain) parts per pixel.
RawFrame color_jitter(const RawFrame& frame, const NoiseModel& model,
                      const AugmentSpec& spec, std::uint64_t stream_key,
                      AugmentStats* stats = nullptr, unsigned threads = 1);

// The same value map with no noise treatment at all.
RawFrame naive_color_jitter(const RawFrame& frame, const AugmentSpec& spec,
                            unsigned threads = 1);

// Value map plus the full target-condition noise, ignoring that the input
// already carries (scaled) noise — the classical alignment scheme.
RawFrame wo_prior_color_jitter(const RawFrame& frame, const NoiseModel& model,
                               const AugmentSpec& spec,
                               std::uint64_t stream_key,
                               AugmentStats* stats = nullptr,
                               unsigned threads = 1);

// Same-color convolution plus the correction noise that restores the
// dark-floor statistics a physical exposure-time blur would have.
RawFrame noise_accounted_blur(const RawFrame& frame, const NoiseModel& model,
                              const BlurKernel& kernel,
                              std::uint64_t stream_key,
                              AugmentStats* stats = nullptr,
                              unsigned threads = 1);

// Plain same-color convolution (shrinks the noise floor by sum w^2).
RawFrame naive_blur(const RawFrame& frame, const BlurKernel& kernel,
                    unsigned threads = 1);

// Whole-quad shift and nearest-quad rescale about the frame center; mosaic
// phase is preserved by construction.  Odd shifts are rounded to even.
RawFrame geometric(const RawFrame& frame, const AugmentSpec& spec);

// Variance-stabilizing transform y = x/k + b/k^2 with k = g*alpha and
// b = g^2*sigma_d^2 + sigma_r^2, applied to black-subtracted values.
RawFrame ksigma_forward(const RawFrame& frame, const NoiseModel& model);
RawFrame ksigma_inverse(const RawFrame& frame, const NoiseModel& model);

// Predicted per-pixel variance (DN^2), treating each value as its own mean.
std::vector<double> variance_map(const RawFrame& frame,
                                 const NoiseModel& model);

enum class AugmentMode { kOurs, kNaive, kWoPrior };

AugmentMode augment_mode_from_string(const std::string& name);

// geometric -> jitter -> blur, with the jitter/blur flavor picked by mode.
// Noise streams derive from spec.seed.
RawFrame augment_frame(const RawFrame& frame, const NoiseModel& model,
                       const AugmentSpec& spec, AugmentMode mode,
                       AugmentStats* stats = nullptr, unsigned threads = 1);

}  // namespace rawaug

