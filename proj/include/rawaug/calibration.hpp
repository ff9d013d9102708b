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

#include "rawaug/noise_model.hpp"
#include "rawaug/raw_frame.hpp"

namespace rawaug {

// Rectangular measurement window, in pixel coordinates.
struct PatchRegion {
  int row = 0;
  int col = 0;
  int rows = 0;
  int cols = 0;
};

void validate_regions(const std::vector<PatchRegion>& regions, int width,
                      int height);

// Interior windows of the 24-patch chart produced by color_checker_scene:
// one per patch, inset by patch_size/8 on every side.
std::vector<PatchRegion> chart_regions(int patch_size);

void save_regions(const std::vector<PatchRegion>& regions,
                  const std::string& path);
std::vector<PatchRegion> load_regions(const std::string& path);

// Per-pixel statistics over the time axis of a burst.  Means are
// black-subtracted; variances are the unbiased (n-1) estimator.
struct TemporalStats {
  int width = 0;
  int height = 0;
  double black_level = 0.0;
  double white_level = 0.0;
  double gain_db = 0.0;
  int n_frames = 0;
  std::vector<double> mean;
  std::vector<double> variance;
  // Raw (not black-subtracted) per-pixel extrema across the burst; clip
  // evidence for pair collection.
  std::vector<double> sample_min;
  std::vector<double> sample_max;
};

TemporalStats temporal_stats(const Burst& burst, unsigned threads = 1);

// Pooled (mean, variance) observations feeding a photon-transfer fit.
struct PairSet {
  std::vector<double> mu;
  std::vector<double> var;
};

// Gathers pairs from the given windows.  Pixels with censored samples are
// dropped: any sample at or below 0, at or beyond the white level, or a mean
// at >= 98% of the black-to-white span (clipping bends the variance down).
PairSet collect_pairs(const TemporalStats& stats,
                      const std::vector<PatchRegion>& regions);

struct RansacConfig {
  int iterations = 500;
  // Inlier band, as a fraction of the inter-quartile range of the variances.
  double iqr_fraction = 0.1;
  // When positive, overrides the IQR rule with a fixed band width.
  double absolute_threshold = 0.0;
  // When positive, the inlier band scales with the candidate's predicted
  // variance: |var - v(mu)| <= relative_threshold * v(mu).  The variance of a
  // temporal-variance estimate grows with the variance itself, so a fixed
  // band truncates bright pairs asymmetrically and tilts the refit; the
  // relative band trims every column of the photon-transfer cloud evenly.
  // Takes precedence over the other two rules.
  double relative_threshold = 0.0;
};

GainLine fit_gain(const PairSet& pairs, double gain_db,
                  const RansacConfig& config, std::uint64_t seed);

// Combines per-gain lines into sensor parameters: slopes constrain the
// photon scale, intercepts split into gain-squared and constant parts.
// Negative variance estimates are clamped to zero and the remaining
// parameter re-solved.
NoiseModel solve_noise_model(const std::vector<GainLine>& lines);

// End-to-end: group bursts by gain tag, pool pairs per gain, fit, solve.
NoiseModel calibrate(const std::vector<Burst>& bursts,
                     const std::vector<PatchRegion>& regions,
                     const RansacConfig& config, std::uint64_t seed,
                     unsigned threads = 1);

// Per-pixel normality screen over the time axis.  Constant series are
// excluded (the test is undefined there); the distinct-value count flags
// quantization sparsity at low means.
struct PixelNormality {
  std::vector<double> mean;     // black-subtracted temporal mean
  std::vector<double> p_value;  // Shapiro-Wilk over the time axis
  std::vector<int> distinct;    // distinct temporal values per pixel
  int constant_excluded = 0;
};

PixelNormality pixel_normality(const Burst& burst,
                               const std::vector<PatchRegion>& regions,
                               unsigned threads = 1);

struct NormalityBucket {
  double mean_lo = 0.0;
  double mean_hi = 0.0;
  int count = 0;
  double pass_fraction = 0.0;  // share with p > 0.05
  int sparse_count = 0;        // pixels with fewer than 10 distinct values
};

struct NormalitySweep {
  std::vector<NormalityBucket> buckets;
  int tested = 0;
  int constant_excluded = 0;
  double overall_pass_fraction = 0.0;
};

// Equal-count buckets by temporal mean.
NormalitySweep bucket_normality(const PixelNormality& pixels, int n_buckets);

NormalitySweep normality_sweep(const Burst& burst,
                               const std::vector<PatchRegion>& regions,
                               int n_buckets, unsigned threads = 1);

}  // namespace rawaug

