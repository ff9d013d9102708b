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

#include "rawaug/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include <json.hpp>

#include "rawaug/error.hpp"
#include "rawaug/parallel.hpp"
#include "rawaug/rng.hpp"
#include "rawaug/stats.hpp"

namespace rawaug {
namespace {

using nlohmann::json;

double quantile_sorted(const std::vector<double>& sorted, double q) {
  // Linear interpolation between order statistics.
  double pos = q * double(sorted.size() - 1);
  std::size_t lo = std::size_t(pos);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - double(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

constexpr std::uint64_t kFitSalt = 0x46495447ull;  // "FITG"

double r2_from_sums(double residual, double total) {
  if (total <= 0.0) return residual == 0.0 ? 1.0 : 0.0;
  return 1.0 - residual / total;
}

// Consensus line fit whose inlier band scales with the candidate's predicted
// value.  Temporal-variance estimates scatter proportionally to the variance
// itself, so the proportional band trims every mean-level evenly; a fixed
// band would truncate the bright end asymmetrically and tilt the refit.
LineFit ransac_relative(const std::vector<double>& x,
                        const std::vector<double>& y, int iterations,
                        double rel, std::uint64_t seed) {
  std::size_t n = x.size();
  CounterRng rng(mix64(seed), 0x52454C42ull);  // "RELB"
  std::size_t min_consensus =
      std::max<std::size_t>(2, std::size_t(std::ceil(0.2 * double(n))));

  auto classify = [&](double slope, double intercept,
                      std::vector<std::uint8_t>& mask) {
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
      double pred = slope * x[k] + intercept;
      mask[k] =
          pred > 0.0 && std::fabs(y[k] - pred) <= rel * pred ? 1 : 0;
      count += mask[k];
    }
    return count;
  };

  // Least squares with weights 1 / pred^2, where pred comes from the line
  // that classified the subset.  The residual scatter grows with the
  // predicted value, so in relative terms the weighted problem is
  // homoscedastic; an unweighted refit lets the bright end steer the line
  // and admits tilted self-consistent fixpoints far from the bulk.
  auto wls_masked = [&](const std::vector<std::uint8_t>& m, double cls_slope,
                        double cls_intercept) {
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (!m[k]) continue;
      double pred = cls_slope * x[k] + cls_intercept;
      double w = 1.0 / (pred * pred);
      sw += w;
      swx += w * x[k];
      swy += w * y[k];
      swxx += w * x[k] * x[k];
      swxy += w * x[k] * y[k];
      ++count;
    }
    double denom = sw * swxx - swx * swx;
    if (count < 2 || !(std::fabs(denom) > 0.0))
      throw DataError("degenerate inlier set in robust line fit");
    LineFit out;
    out.slope = (sw * swxy - swx * swy) / denom;
    out.intercept = (swy - out.slope * swx) / sw;
    double my = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (m[k]) my += y[k];
    my /= double(count);
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (!m[k]) continue;
      double r = y[k] - (out.slope * x[k] + out.intercept);
      ss_res += r * r;
      double d = y[k] - my;
      ss_tot += d * d;
    }
    out.r2 = r2_from_sums(ss_res, ss_tot);
    out.inlier_mask = m;
    out.inlier_count = count;
    return out;
  };

  std::vector<std::uint8_t> best_mask, mask(n);
  std::size_t best_count = 0;
  double best_slope = 0.0, best_intercept = 0.0;
  for (int iter = 0; iter < iterations; ++iter) {
    std::size_t i = std::size_t(rng.next_u64() % n);
    std::size_t j = std::size_t(rng.next_u64() % n);
    if (i == j || x[i] == x[j]) continue;
    double slope = (y[j] - y[i]) / (x[j] - x[i]);
    double intercept = y[i] - slope * x[i];
    std::size_t count = classify(slope, intercept, mask);
    if (count > best_count) {
      best_count = count;
      best_mask = mask;
      best_slope = slope;
      best_intercept = intercept;
    }
  }
  if (best_count < min_consensus)
    throw DataError("no consensus set found by robust line fit");

  // Refine to a fixpoint: the returned line is a weighted fit of exactly
  // the points inside its own band.
  LineFit fit = wls_masked(best_mask, best_slope, best_intercept);
  for (int round = 0; round < 64; ++round) {
    std::size_t count = classify(fit.slope, fit.intercept, mask);
    if (mask == fit.inlier_mask) break;
    if (count < 2) break;
    fit = wls_masked(mask, fit.slope, fit.intercept);
  }
  return fit;
}

}  // namespace

void validate_regions(const std::vector<PatchRegion>& regions, int width,
                      int height) {
  if (regions.empty()) throw DataError("no measurement regions given");
  for (const PatchRegion& r : regions) {
    if (r.rows <= 0 || r.cols <= 0 || r.row < 0 || r.col < 0 ||
        r.row + r.rows > height || r.col + r.cols > width)
      throw DataError("measurement region out of bounds");
  }
}

std::vector<PatchRegion> chart_regions(int patch_size) {
  if (patch_size < 8 || patch_size % 2 != 0)
    throw DataError("patch size must be even and >= 8");
  int margin = patch_size / 8;
  std::vector<PatchRegion> regions;
  regions.reserve(24);
  for (int pr = 0; pr < 4; ++pr) {
    for (int pc = 0; pc < 6; ++pc) {
      PatchRegion r;
      r.row = pr * patch_size + margin;
      r.col = pc * patch_size + margin;
      r.rows = patch_size - 2 * margin;
      r.cols = patch_size - 2 * margin;
      regions.push_back(r);
    }
  }
  return regions;
}

void save_regions(const std::vector<PatchRegion>& regions,
                  const std::string& path) {
  json arr = json::array();
  for (const PatchRegion& r : regions)
    arr.push_back({{"row", r.row}, {"col", r.col}, {"rows", r.rows},
                   {"cols", r.cols}});
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << arr.dump(2) << "\n";
}

std::vector<PatchRegion> load_regions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing regions file: " + path);
  json arr;
  try {
    in >> arr;
  } catch (const json::exception& e) {
    throw DataError("malformed regions file: " + std::string(e.what()));
  }
  if (!arr.is_array() || arr.empty())
    throw DataError("regions file must hold a non-empty array");
  std::vector<PatchRegion> regions;
  try {
    for (const json& item : arr) {
      PatchRegion r;
      r.row = item.at("row").get<int>();
      r.col = item.at("col").get<int>();
      r.rows = item.at("rows").get<int>();
      r.cols = item.at("cols").get<int>();
      regions.push_back(r);
    }
  } catch (const json::exception& e) {
    throw DataError("malformed region entry: " + std::string(e.what()));
  }
  return regions;
}

TemporalStats temporal_stats(const Burst& burst, unsigned threads) {
  validate_burst(burst);
  const RawFrame& first = burst.frames.front();
  if (first.normalized)
    throw DataError("temporal statistics expect unnormalized frames");
  TemporalStats stats;
  stats.width = first.width;
  stats.height = first.height;
  stats.black_level = first.black_level;
  stats.white_level = first.white_level;
  stats.gain_db = first.gain_db;
  stats.n_frames = int(burst.frames.size());
  std::size_t n_pix = first.pixel_count();
  stats.mean.assign(n_pix, 0.0);
  stats.variance.assign(n_pix, 0.0);
  stats.sample_min.assign(n_pix, 0.0);
  stats.sample_max.assign(n_pix, 0.0);
  double n = double(stats.n_frames);
  parallel_for(n_pix, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double sum = 0.0;
      double lo = burst.frames.front().pixels[i], hi = lo;
      for (const RawFrame& f : burst.frames) {
        double v = f.pixels[i];
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      double mean = sum / n;
      double ss = 0.0;
      for (const RawFrame& f : burst.frames) {
        double d = f.pixels[i] - mean;
        ss += d * d;
      }
      stats.mean[i] = mean - first.black_level;
      stats.variance[i] = ss / (n - 1.0);
      stats.sample_min[i] = lo;
      stats.sample_max[i] = hi;
    }
  });
  return stats;
}

PairSet collect_pairs(const TemporalStats& stats,
                      const std::vector<PatchRegion>& regions) {
  validate_regions(regions, stats.width, stats.height);
  if (stats.sample_min.size() != stats.mean.size() ||
      stats.sample_max.size() != stats.mean.size())
    throw DataError("temporal stats are missing the per-pixel extrema");
  double span = stats.white_level - stats.black_level;
  double saturation = 0.98 * span;
  PairSet pairs;
  for (const PatchRegion& r : regions) {
    for (int row = r.row; row < r.row + r.rows; ++row) {
      for (int col = r.col; col < r.col + r.cols; ++col) {
        std::size_t i = std::size_t(row) * stats.width + col;
        if (stats.mean[i] >= saturation) continue;
        // Censored samples bias both moments; keep only clip-free pixels.
        if (stats.sample_min[i] <= 0.0) continue;
        if (stats.sample_max[i] >= stats.white_level) continue;
        pairs.mu.push_back(stats.mean[i]);
        pairs.var.push_back(stats.variance[i]);
      }
    }
  }
  return pairs;
}

GainLine fit_gain(const PairSet& pairs, double gain_db,
                  const RansacConfig& config, std::uint64_t seed) {
  std::size_t n = pairs.mu.size();
  if (n != pairs.var.size()) throw DataError("pair set arrays disagree");
  if (n < 2) throw DataError("too few pairs for a photon-transfer fit");
  if (config.iterations < 1) throw DataError("need at least one iteration");

  LineFit fit;
  if (config.relative_threshold > 0.0) {
    fit = ransac_relative(pairs.mu, pairs.var, config.iterations,
                          config.relative_threshold,
                          derive_stream(seed, kFitSalt));
  } else {
    double threshold = config.absolute_threshold;
    if (!(threshold > 0.0)) {
      std::vector<double> sorted = pairs.var;
      std::sort(sorted.begin(), sorted.end());
      double iqr =
          quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
      if (!(iqr > 0.0))
        throw DataError("degenerate variance spread; cannot set inlier band");
      threshold = config.iqr_fraction * iqr;
    }
    fit = ransac_line(pairs.mu, pairs.var, config.iterations, threshold,
                      derive_stream(seed, kFitSalt));
  }
  if (!(fit.slope > 0.0))
    throw DataError("photon-transfer slope must be positive");

  GainLine line;
  line.gain_db = gain_db;
  line.slope = fit.slope;
  line.intercept = fit.intercept;
  line.r2 = fit.r2;
  line.inlier_fraction = double(fit.inlier_count) / double(n);
  line.n_pairs = int(n);
  return line;
}

// Scale each row by 1 / rhs so the solve minimizes relative residuals.  The
// per-gain line errors are roughly constant in relative terms, so in absolute
// terms the top-gain rows are orders of magnitude noisier; unweighted they
// dominate the floor split, and the extrapolated post-gain floor amplifies
// their wobble about tenfold.  Left unscaled if any rhs is non-positive.
static void relativize(std::vector<ConstraintRow>& rows) {
  for (const ConstraintRow& row : rows)
    if (!(row.rhs > 0.0)) return;
  for (ConstraintRow& row : rows) {
    for (double& c : row.coeffs) c /= row.rhs;
    row.rhs = 1.0;
  }
}

NoiseModel solve_noise_model(const std::vector<GainLine>& lines) {
  if (lines.size() < 2)
    throw DataError("need lines from at least two gains");
  {
    std::vector<double> gains;
    for (const GainLine& l : lines) gains.push_back(l.gain_db);
    std::sort(gains.begin(), gains.end());
    if (std::adjacent_find(gains.begin(), gains.end()) != gains.end())
      throw DataError("gain lines must come from distinct gains");
  }

  // Photon scale from the slopes: slope_g = g * alpha.
  std::vector<ConstraintRow> slope_rows;
  for (const GainLine& l : lines) {
    double g = GainValue{l.gain_db}.linear();
    slope_rows.push_back({{g}, l.slope});
  }
  relativize(slope_rows);
  LstsqResult alpha_fit = lstsq_through_constraints(slope_rows);
  double alpha = alpha_fit.solution[0];
  if (!(alpha > 0.0)) throw DataError("photon scale came out non-positive");

  // Floor split from the intercepts: intercept_g = g^2 * pre + post.
  std::vector<ConstraintRow> floor_rows;
  for (const GainLine& l : lines) {
    double g = GainValue{l.gain_db}.linear();
    floor_rows.push_back({{g * g, 1.0}, l.intercept});
  }
  relativize(floor_rows);
  LstsqResult floor_fit = lstsq_through_constraints(floor_rows);
  double sigma_d2 = floor_fit.solution[0];
  double sigma_r2 = floor_fit.solution[1];
  bool clamped = false;
  if (sigma_d2 < 0.0) {
    clamped = true;
    sigma_d2 = 0.0;
    std::vector<ConstraintRow> rows;
    for (const GainLine& l : lines) rows.push_back({{1.0}, l.intercept});
    relativize(rows);
    sigma_r2 = lstsq_through_constraints(rows).solution[0];
  } else if (sigma_r2 < 0.0) {
    clamped = true;
    sigma_r2 = 0.0;
    std::vector<ConstraintRow> rows;
    for (const GainLine& l : lines) {
      double g = GainValue{l.gain_db}.linear();
      rows.push_back({{g * g}, l.intercept});
    }
    relativize(rows);
    sigma_d2 = lstsq_through_constraints(rows).solution[0];
  }
  sigma_d2 = std::max(sigma_d2, 0.0);
  sigma_r2 = std::max(sigma_r2, 0.0);

  // Agreement of the final parameters with the raw per-gain lines.
  double slope_res = 0.0, slope_tot = 0.0, slope_mean = 0.0;
  double floor_res = 0.0, floor_tot = 0.0, floor_mean = 0.0;
  for (const GainLine& l : lines) {
    slope_mean += l.slope;
    floor_mean += l.intercept;
  }
  slope_mean /= double(lines.size());
  floor_mean /= double(lines.size());
  for (const GainLine& l : lines) {
    double g = GainValue{l.gain_db}.linear();
    double ds = l.slope - g * alpha;
    double df = l.intercept - (g * g * sigma_d2 + sigma_r2);
    slope_res += ds * ds;
    floor_res += df * df;
    double cs = l.slope - slope_mean;
    double cf = l.intercept - floor_mean;
    slope_tot += cs * cs;
    floor_tot += cf * cf;
  }

  NoiseModel model;
  model.alpha = alpha;
  model.sigma_d2 = sigma_d2;
  model.sigma_r2 = sigma_r2;
  model.has_provenance = true;
  model.per_gain = lines;
  model.alpha_r2 = r2_from_sums(slope_res, slope_tot);
  model.read_noise_r2 = r2_from_sums(floor_res, floor_tot);
  model.clamped = clamped;
  validate_model(model);
  return model;
}

NoiseModel calibrate(const std::vector<Burst>& bursts,
                     const std::vector<PatchRegion>& regions,
                     const RansacConfig& config, std::uint64_t seed,
                     unsigned threads) {
  if (bursts.empty()) throw DataError("no bursts given");
  std::map<double, PairSet> by_gain;
  for (const Burst& burst : bursts) {
    TemporalStats stats = temporal_stats(burst, threads);
    PairSet pairs = collect_pairs(stats, regions);
    PairSet& pool = by_gain[stats.gain_db];
    pool.mu.insert(pool.mu.end(), pairs.mu.begin(), pairs.mu.end());
    pool.var.insert(pool.var.end(), pairs.var.begin(), pairs.var.end());
  }
  std::vector<GainLine> lines;
  std::uint64_t index = 0;
  for (const auto& [gain_db, pairs] : by_gain)
    lines.push_back(fit_gain(pairs, gain_db, config, derive_stream(seed, index++)));
  return solve_noise_model(lines);
}

PixelNormality pixel_normality(const Burst& burst,
                               const std::vector<PatchRegion>& regions,
                               unsigned threads) {
  validate_burst(burst);
  const RawFrame& first = burst.frames.front();
  if (first.normalized)
    throw DataError("normality sweep expects unnormalized frames");
  if (burst.frames.size() < 20)
    throw DataError("normality sweep needs at least 20 frames");
  validate_regions(regions, first.width, first.height);

  std::vector<std::size_t> indices;
  for (const PatchRegion& r : regions)
    for (int row = r.row; row < r.row + r.rows; ++row)
      for (int col = r.col; col < r.col + r.cols; ++col)
        indices.push_back(std::size_t(row) * first.width + col);

  std::size_t n_frames = burst.frames.size();
  // p < 0 marks a constant series (test undefined there).
  std::vector<double> means(indices.size()), pvals(indices.size());
  std::vector<int> distinct(indices.size());
  parallel_for(indices.size(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> series(n_frames), sorted(n_frames);
    for (std::size_t k = begin; k < end; ++k) {
      std::size_t i = indices[k];
      double sum = 0.0;
      for (std::size_t f = 0; f < n_frames; ++f) {
        series[f] = burst.frames[f].pixels[i];
        sum += series[f];
      }
      means[k] = sum / double(n_frames) - first.black_level;
      sorted = series;
      std::sort(sorted.begin(), sorted.end());
      distinct[k] = int(std::unique(sorted.begin(), sorted.end()) -
                        sorted.begin());
      pvals[k] = distinct[k] < 2 ? -1.0 : shapiro_wilk(series).p_value;
    }
  });

  PixelNormality result;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (pvals[k] < 0.0) {
      ++result.constant_excluded;
      continue;
    }
    result.mean.push_back(means[k]);
    result.p_value.push_back(pvals[k]);
    result.distinct.push_back(distinct[k]);
  }
  if (result.mean.empty()) throw DataError("all pixels were constant in time");
  return result;
}

NormalitySweep bucket_normality(const PixelNormality& pixels, int n_buckets) {
  if (n_buckets < 1) throw DataError("need at least one bucket");
  std::size_t n = pixels.mean.size();
  if (n == 0) throw DataError("no tested pixels to bucket");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pixels.mean[a] < pixels.mean[b];
  });

  NormalitySweep sweep;
  sweep.tested = int(n);
  sweep.constant_excluded = pixels.constant_excluded;
  int total_pass = 0;
  std::size_t buckets = std::min<std::size_t>(std::size_t(n_buckets), n);
  std::size_t base = n / buckets, extra = n % buckets;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < buckets; ++b) {
    std::size_t count = base + (b < extra ? 1 : 0);
    NormalityBucket bucket;
    bucket.mean_lo = pixels.mean[order[pos]];
    bucket.mean_hi = pixels.mean[order[pos + count - 1]];
    bucket.count = int(count);
    int pass = 0;
    for (std::size_t k = pos; k < pos + count; ++k) {
      if (pixels.p_value[order[k]] > 0.05) ++pass;
      if (pixels.distinct[order[k]] < 10) ++bucket.sparse_count;
    }
    bucket.pass_fraction = double(pass) / double(count);
    total_pass += pass;
    sweep.buckets.push_back(bucket);
    pos += count;
  }
  sweep.overall_pass_fraction = double(total_pass) / double(n);
  return sweep;
}

NormalitySweep normality_sweep(const Burst& burst,
                               const std::vector<PatchRegion>& regions,
                               int n_buckets, unsigned threads) {
  return bucket_normality(pixel_normality(burst, regions, threads), n_buckets);
}

}  // namespace rawaug
