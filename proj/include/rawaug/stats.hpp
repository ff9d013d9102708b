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
#include <vector>

namespace rawaug {

// Fitted line y = slope * x + intercept.  r2 is the coefficient of
// determination over the points the fit actually used (everything for OLS,
// the consensus set for RANSAC); 1 - SS_res/SS_tot, defined as 1 when the fit
// is exact and SS_tot is zero.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<std::uint8_t> inlier_mask;  // aligned with input, 1 = used
  std::size_t inlier_count = 0;
};

struct TestResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

struct ConstraintRow {
  std::vector<double> coeffs;
  double rhs = 0.0;
};

struct LstsqResult {
  std::vector<double> solution;
  double r2 = 0.0;
};

// Ordinary least squares.  Needs >= 2 points and non-degenerate x.
LineFit ols_line(const std::vector<double>& x, const std::vector<double>& y);

// RANSAC line fit: `iterations` two-point hypotheses scored by inlier count
// (|residual| <= inlier_threshold), refit by OLS on the best consensus set.
// Deterministic for a given seed.  Fails if no consensus of size
// >= max(2, 20% of points) emerges.
LineFit ransac_line(const std::vector<double>& x, const std::vector<double>& y,
                    int iterations, double inlier_threshold,
                    std::uint64_t seed);

// Linear least squares over rows coeffs . solution = rhs, solved via normal
// equations.  Needs at least as many rows as unknowns and a non-singular
// system.
LstsqResult lstsq_through_constraints(const std::vector<ConstraintRow>& rows);

// Shapiro-Wilk W normality test (Royston's 1995 method), complete samples,
// 3 <= n <= 5000.  Fails on n out of range or zero sample range.
TestResult shapiro_wilk(const std::vector<double>& sample);

// Two-sample two-sided Kolmogorov-Smirnov test.  D is the sup-distance of the
// empirical CDFs; the p-value uses the asymptotic Kolmogorov distribution at
// lambda = sqrt(n*m/(n+m)) * D.  Fails on an empty sample.
TestResult ks_two_sample(const std::vector<double>& a,
                         const std::vector<double>& b);

// Building blocks, exposed for direct validation.
// One-sample KS against N(mu, sigma^2), asymptotic p-value.
TestResult ks_gaussian(const std::vector<double>& sample, double mu,
                       double sigma);

double normal_quantile(double p);        // inverse standard normal CDF (AS 241)
double normal_sf(double z);              // upper tail of the standard normal
double kolmogorov_sf(double lambda);     // Kolmogorov distribution survival

}  // namespace rawaug
