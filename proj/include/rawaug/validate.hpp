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

#include "rawaug/blur_kernel.hpp"
#include "rawaug/calibration.hpp"
#include "rawaug/noise_model.hpp"
#include "rawaug/sensor_sim.hpp"
#include "rawaug/stats.hpp"

namespace rawaug {

enum class ConversionMethod { kOurs, kWoPrior, kNone };
enum class BlurMode { kNoiseAccounted, kNaive };

ConversionMethod conversion_from_string(const std::string& name);
std::string conversion_to_string(ConversionMethod method);

// Side-by-side comparison of a converted burst's mean-variance relation
// against real captures at the target condition.  Relative errors are
// absolute values; signs can be read off the two lines.
struct AlignmentReport {
  std::string method;
  std::string conversion;
  GainLine real_line;
  GainLine converted_line;
  double slope_rel_err = 0.0;
  double intercept_rel_err = 0.0;
  TestResult ks;  // two-sample, on residuals standardized by the real line
  std::size_t clipped_variance_pixels = 0;
  PairSet real_pairs;
  PairSet converted_pairs;
};

// Captures a source burst, converts it per `method` to the dimmer condition
// (illumination scaled by `contrast`), captures a real burst there, and fits
// both photon-transfer lines on pairs from `regions`.
AlignmentReport alignment_experiment(const NoiseModel& model,
                                     const SensorSpec& sensor,
                                     const SceneMap& scene, GainValue gain,
                                     double contrast, ConversionMethod method,
                                     int n_frames,
                                     const std::vector<PatchRegion>& regions,
                                     std::uint64_t seed, unsigned threads = 1);

// Same comparison for blur: per-frame blur augmentation vs repeated captures
// of the physically blurred scene.
AlignmentReport blur_alignment_experiment(
    const NoiseModel& model, const SensorSpec& sensor, const SceneMap& scene,
    GainValue gain, const BlurKernel& kernel, BlurMode mode, int n_frames,
    const std::vector<PatchRegion>& regions, std::uint64_t seed,
    unsigned threads = 1);

struct NormalityReport {
  PixelNormality pixels;
  NormalitySweep sweep;
};

NormalityReport normality_report(const Burst& burst,
                                 const std::vector<PatchRegion>& regions,
                                 int n_buckets, unsigned threads = 1);

// Artifact writers (full-precision JSON/CSV, deterministic content).
void write_alignment_report(const AlignmentReport& report,
                            const std::string& json_path,
                            const std::string& csv_path);
void write_normality_report(const NormalityReport& report,
                            const std::string& json_path,
                            const std::string& csv_path);

struct BenchEntry {
  std::string op;
  double median_ms = 0.0;
  double p95_ms = 0.0;
  double megapixels_per_s = 0.0;
};

// Wall-time per operator on synthetic frames; reporting only, no assertions.
std::vector<BenchEntry> bench(int width, int height, int repetitions,
                              unsigned threads, std::uint64_t seed);

void write_bench_report(const std::vector<BenchEntry>& entries,
                        const std::string& json_path);

}  // namespace rawaug

