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
#include <string>
#include <vector>

#include "rawaug/raw_frame.hpp"
#include "rawaug/rng.hpp"

namespace rawaug {

// Per-gain fitted variance line: var = slope * mu + intercept, with mu the
// black-subtracted mean signal in DN.
struct GainLine {
  double gain_db = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double inlier_fraction = 1.0;
  std::size_t n_pairs = 0;
};

// Heteroscedastic Gaussian sensor noise model.  alpha couples signal level to
// shot-noise variance; sigma_d2 and sigma_r2 are the pre- and post-gain
// additive noise variances.  At linear gain g and black-subtracted level mu:
//   var(mu) = g * alpha * mu + g^2 * sigma_d2 + sigma_r2.
struct NoiseModel {
  double alpha = 1.0;
  double sigma_d2 = 0.0;
  double sigma_r2 = 0.0;

  // Calibration provenance; absent for hand-written models.
  bool has_provenance = false;
  std::vector<GainLine> per_gain;
  double alpha_r2 = 0.0;       // fit quality of slope = g * alpha
  double read_noise_r2 = 0.0;  // fit quality of intercept = g^2 sd2 + sr2
  bool clamped = false;        // a negative component was clamped to zero
};

// alpha must be positive and the variance components non-negative.
void validate_model(const NoiseModel& model);

// Model variance at black-subtracted level mu >= 0.
double variance_at(const NoiseModel& model, GainValue gain, double mu);

// One draw from N(mu, variance_at(mu)).  Consumes no randomness when the
// variance is exactly zero, so a zero-noise model reproduces mu bit-exactly.
double sample_gaussian(const NoiseModel& model, GainValue gain, double mu,
                       CounterRng& rng);

// The variance line the model implies at a gain.
GainLine gain_line_of(const NoiseModel& model, GainValue gain);

// JSON round trip.  Loading tolerates a missing provenance block.
std::string model_to_json(const NoiseModel& model);
NoiseModel model_from_json(const std::string& text);
void save_noise_model(const NoiseModel& model, const std::string& path);
NoiseModel load_noise_model(const std::string& path);

}  // namespace rawaug
