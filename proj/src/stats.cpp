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

#include "rawaug/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rawaug/error.hpp"
#include "rawaug/rng.hpp"

namespace rawaug {
namespace {

constexpr double kPi = 3.14159265358979323846;

// 1 - SS_res/SS_tot with the exact-fit convention for constant y.
double r2_from_sums(double ss_res, double ss_tot) {
  if (ss_tot <= 0.0)
    return ss_res <= 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
  return 1.0 - ss_res / ss_tot;
}

struct CoreFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// OLS over the masked subset (empty mask = all points).
CoreFit ols_core(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<std::uint8_t>* mask) {
  double sx = 0, sy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    sx += x[i];
    sy += y[i];
    ++n;
  }
  if (n < 2) throw DataError("line fit needs at least two points");
  double mx = sx / double(n), my = sy / double(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw DataError("line fit needs non-degenerate x values");
  CoreFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
    ss_tot += (y[i] - my) * (y[i] - my);
  }
  fit.r2 = r2_from_sums(ss_res, ss_tot);
  return fit;
}

// Horner evaluation matching the AS order convention (c[0] is the constant).
double poly(const double* c, int order, double x) {
  double p = c[order - 1];
  for (int i = order - 2; i >= 0; --i) p = p * x + c[i];
  return p;
}

constexpr std::uint64_t kRansacSalt = 0x52414E53414331ull;

}  // namespace

LineFit ols_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DataError("x and y sizes differ");
  CoreFit core = ols_core(x, y, nullptr);
  LineFit fit;
  fit.slope = core.slope;
  fit.intercept = core.intercept;
  fit.r2 = core.r2;
  fit.inlier_mask.assign(x.size(), 1);
  fit.inlier_count = x.size();
  return fit;
}

LineFit ransac_line(const std::vector<double>& x, const std::vector<double>& y,
                    int iterations, double inlier_threshold,
                    std::uint64_t seed) {
  if (x.size() != y.size()) throw DataError("x and y sizes differ");
  std::size_t n = x.size();
  if (n < 2) throw DataError("line fit needs at least two points");
  if (!(inlier_threshold > 0.0)) throw DataError("inlier threshold must be positive");
  if (iterations < 1) throw DataError("iteration count must be positive");

  CounterRng rng(mix64(seed), kRansacSalt);
  std::size_t min_consensus =
      std::max<std::size_t>(2, std::size_t(std::ceil(0.2 * double(n))));

  std::vector<std::uint8_t> best_mask, mask(n);
  std::size_t best_count = 0;
  double best_residual = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < iterations; ++iter) {
    std::size_t i = std::size_t(rng.next_u64() % n);
    std::size_t j = std::size_t(rng.next_u64() % n);
    if (i == j || x[i] == x[j]) continue;
    double slope = (y[j] - y[i]) / (x[j] - x[i]);
    double intercept = y[i] - slope * x[i];

    std::size_t count = 0;
    double residual_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double r = std::fabs(y[k] - (slope * x[k] + intercept));
      if (r <= inlier_threshold) {
        mask[k] = 1;
        ++count;
        residual_sum += r;
      } else {
        mask[k] = 0;
      }
    }
    if (count > best_count ||
        (count == best_count && residual_sum < best_residual)) {
      best_count = count;
      best_residual = residual_sum;
      best_mask = mask;
    }
  }

  if (best_count < min_consensus)
    throw DataError("no consensus set found by robust line fit");

  CoreFit core = ols_core(x, y, &best_mask);
  LineFit fit;
  fit.slope = core.slope;
  fit.intercept = core.intercept;
  fit.r2 = core.r2;
  fit.inlier_mask = std::move(best_mask);
  fit.inlier_count = best_count;
  return fit;
}

LstsqResult lstsq_through_constraints(const std::vector<ConstraintRow>& rows) {
  if (rows.empty()) throw DataError("least squares needs at least one row");
  std::size_t k = rows.front().coeffs.size();
  if (k == 0) throw DataError("constraint rows must have coefficients");
  for (const ConstraintRow& row : rows)
    if (row.coeffs.size() != k)
      throw DataError("constraint rows must share one width");
  if (rows.size() < k)
    throw DataError("least squares needs at least as many rows as unknowns");

  // Normal equations; k is tiny here (1-2 unknowns), so this is plenty.
  std::vector<std::vector<double>> ata(k, std::vector<double>(k, 0.0));
  std::vector<double> atb(k, 0.0);
  for (const ConstraintRow& row : rows) {
    for (std::size_t i = 0; i < k; ++i) {
      atb[i] += row.coeffs[i] * row.rhs;
      for (std::size_t j = 0; j < k; ++j)
        ata[i][j] += row.coeffs[i] * row.coeffs[j];
    }
  }

  double scale = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      scale = std::max(scale, std::fabs(ata[i][j]));
  if (scale == 0.0) throw DataError("singular least-squares system");

  // Gaussian elimination with partial pivoting.
  std::vector<double> sol = atb;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::fabs(ata[r][col]) > std::fabs(ata[pivot][col])) pivot = r;
    if (std::fabs(ata[pivot][col]) < 1e-12 * scale)
      throw DataError("singular least-squares system");
    std::swap(ata[col], ata[pivot]);
    std::swap(sol[col], sol[pivot]);
    for (std::size_t r = col + 1; r < k; ++r) {
      double f = ata[r][col] / ata[col][col];
      for (std::size_t c = col; c < k; ++c) ata[r][c] -= f * ata[col][c];
      sol[r] -= f * sol[col];
    }
  }
  for (std::size_t col = k; col-- > 0;) {
    for (std::size_t c = col + 1; c < k; ++c) sol[col] -= ata[col][c] * sol[c];
    sol[col] /= ata[col][col];
  }

  double mean_rhs = 0.0;
  for (const ConstraintRow& row : rows) mean_rhs += row.rhs;
  mean_rhs /= double(rows.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (const ConstraintRow& row : rows) {
    double pred = 0.0;
    for (std::size_t i = 0; i < k; ++i) pred += row.coeffs[i] * sol[i];
    ss_res += (row.rhs - pred) * (row.rhs - pred);
    ss_tot += (row.rhs - mean_rhs) * (row.rhs - mean_rhs);
  }

  LstsqResult result;
  result.solution = std::move(sol);
  result.r2 = r2_from_sums(ss_res, ss_tot);
  return result;
}

double normal_quantile(double p) {
  // Wichura's algorithm AS 241, PPND16.
  if (!(p > 0.0 && p < 1.0))
    throw DataError("normal quantile needs p strictly inside (0, 1)");
  double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    double r = 0.180625 - q * q;
    double num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                       6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                     1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                   1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    double den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                       3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                     5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                   4.2313330701600911252e1) * r + 1.0);
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    double num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                       2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                     3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                   4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    double den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                       1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                     6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                   2.05319162663775882187e0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    double num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                       1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                     2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                   5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    double den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                       1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                     1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                   5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return q < 0.0 ? -val : val;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double kolmogorov_sf(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.0) {
    // Theta-series dual, accurate for small lambda where the alternating
    // series converges slowly.
    double t = kPi * kPi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int j = 1; j < 40; j += 2) {
      double term = std::exp(-double(j) * double(j) * t);
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    double cdf = std::sqrt(2.0 * kPi) / lambda * sum;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j < 200; ++j) {
    double term = std::exp(-2.0 * double(j) * double(j) * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult shapiro_wilk(const std::vector<double>& sample) {
  // Royston's AS R94 recipe for complete (uncensored) samples, in doubles.
  static constexpr double kC1[6] = {0.0, 0.221157, -0.147981, -2.07119,
                                    4.434685, -2.706056};
  static constexpr double kC2[6] = {0.0, 0.042981, -0.293762, -1.752461,
                                    5.682633, -3.582633};
  static constexpr double kC3[4] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static constexpr double kC4[4] = {1.3822, -0.77857, 0.062767, -2.0322e-3};
  static constexpr double kC5[4] = {-1.5861, -0.31082, -0.083751, 3.8915e-3};
  static constexpr double kC6[3] = {-0.4803, -0.082676, 3.0302e-3};
  static constexpr double kG[2] = {-2.273, 0.459};
  static constexpr double kPi6 = 1.909859;   // 6/pi
  static constexpr double kStqr = 1.047198;  // pi/3

  std::size_t n = sample.size();
  if (n < 3) throw DataError("normality test needs at least 3 values");
  if (n > 5000) throw DataError("normality test supports at most 5000 values");

  std::vector<double> x = sample;
  std::sort(x.begin(), x.end());
  double range = x.back() - x.front();
  if (!(range > 0.0)) throw DataError("normality test needs non-zero range");

  double an = double(n);
  std::size_t n2 = n / 2;
  std::vector<double> a(n2);
  if (n == 3) {
    a[0] = std::sqrt(0.5);
  } else {
    double an25 = an + 0.25;
    double summ2 = 0.0;
    for (std::size_t i = 0; i < n2; ++i) {
      a[i] = normal_quantile((double(i + 1) - 0.375) / an25);
      summ2 += a[i] * a[i];
    }
    summ2 *= 2.0;
    double ssumm2 = std::sqrt(summ2);
    double rsn = 1.0 / std::sqrt(an);
    double a1 = poly(kC1, 6, rsn) - a[0] / ssumm2;
    std::size_t i1;
    double fac;
    if (n > 5) {
      double a2 = poly(kC2, 6, rsn) - a[1] / ssumm2;
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[0] = a1;
      a[1] = a2;
      i1 = 2;
    } else {
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
      a[0] = a1;
      i1 = 1;
    }
    for (std::size_t i = i1; i < n2; ++i) a[i] = -a[i] / fac;
  }

  // W as a squared correlation, accumulated as w1 = 1 - W for accuracy
  // near W = 1.  Values are range-scaled like the reference.
  double sx = 0.0;
  for (double v : x) sx += v / range;
  sx /= an;
  double ssx = 0.0, ssa = 0.0, sax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Antisymmetric full coefficient: -a[i] for the lower half, +a[n-1-i]
    // for the upper half, 0 in the middle of an odd-length sample.
    double coeff = 0.0;
    std::size_t j = n - 1 - i;
    if (i < j)
      coeff = -a[i];
    else if (i > j)
      coeff = a[j];
    double xs = x[i] / range - sx;
    ssa += coeff * coeff;
    ssx += xs * xs;
    sax += coeff * xs;
  }
  double ssassx = std::sqrt(ssa * ssx);
  double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
  double w = 1.0 - w1;

  TestResult result;
  result.statistic = w;
  if (n == 3) {
    result.p_value =
        std::clamp(kPi6 * (std::asin(std::sqrt(w)) - kStqr), 0.0, 1.0);
    return result;
  }
  double y = std::log(w1);
  double logn = std::log(an);
  double m, s;
  if (n <= 11) {
    double gamma = poly(kG, 2, an);
    if (y >= gamma) {
      result.p_value = 1e-19;
      return result;
    }
    y = -std::log(gamma - y);
    m = poly(kC3, 4, an);
    s = std::exp(poly(kC4, 4, an));
  } else {
    m = poly(kC5, 4, logn);
    s = std::exp(poly(kC6, 3, logn));
  }
  result.p_value = normal_sf((y - m) / s);
  return result;
}

TestResult ks_two_sample(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.empty() || b.empty())
    throw DataError("distribution comparison needs non-empty samples");
  std::vector<double> sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double n = double(sa.size()), m = double(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= v) ++i;
    while (j < sb.size() && sb[j] <= v) ++j;
    d = std::max(d, std::fabs(double(i) / n - double(j) / m));
  }
  TestResult result;
  result.statistic = d;
  result.p_value = kolmogorov_sf(std::sqrt(n * m / (n + m)) * d);
  return result;
}

TestResult ks_gaussian(const std::vector<double>& sample, double mu,
                       double sigma) {
  if (sample.empty())
    throw DataError("distribution comparison needs non-empty samples");
  if (!(sigma > 0.0)) throw DataError("sigma must be positive");
  std::vector<double> sorted = sample;
  std::sort(sorted.begin(), sorted.end());
  double n = double(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    double cdf = 1.0 - normal_sf((sorted[i] - mu) / sigma);
    d = std::max(d, std::max(std::fabs(double(i + 1) / n - cdf),
                             std::fabs(double(i) / n - cdf)));
  }
  TestResult result;
  result.statistic = d;
  result.p_value = kolmogorov_sf(std::sqrt(n) * d);
  return result;
}

}  // namespace rawaug
