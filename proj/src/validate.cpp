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

#include "rawaug/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>

#include <json.hpp>

#include "rawaug/augment.hpp"
#include "rawaug/error.hpp"
#include "rawaug/isp.hpp"
#include "rawaug/rng.hpp"

namespace rawaug {
namespace {

using nlohmann::json;

constexpr std::uint64_t kSourceSalt = 0x535243ull;     // "SRC"
constexpr std::uint64_t kRealSalt = 0x524541ull;       // "REA"
constexpr std::uint64_t kConvertSalt = 0x434E56ull;    // "CNV"
constexpr std::uint64_t kFitRealSalt = 0x46495452ull;  // "FITR"
constexpr std::uint64_t kFitConvSalt = 0x46495443ull;  // "FITC"

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json line_to_json(const GainLine& line) {
  return {{"gain_db", line.gain_db},       {"slope", line.slope},
          {"intercept", line.intercept},   {"r2", line.r2},
          {"inlier_fraction", line.inlier_fraction},
          {"n_pairs", line.n_pairs}};
}

// Residuals standardized by the real line's prediction; the common
// frame-count factor cancels in the two-sample comparison.
std::vector<double> standardized_residuals(const PairSet& pairs,
                                           const GainLine& real) {
  std::vector<double> z(pairs.mu.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    double predicted = real.slope * pairs.mu[i] + real.intercept;
    if (!(predicted > 0.0)) predicted = 1.0;
    z[i] = (pairs.var[i] - predicted) / predicted;
  }
  return z;
}

AlignmentReport compare_bursts(const Burst& converted, const Burst& real,
                               const std::vector<PatchRegion>& regions,
                               std::uint64_t seed, unsigned threads) {
  TemporalStats conv_stats = temporal_stats(converted, threads);
  TemporalStats real_stats = temporal_stats(real, threads);
  AlignmentReport report;
  report.converted_pairs = collect_pairs(conv_stats, regions);
  report.real_pairs = collect_pairs(real_stats, regions);
  if (report.converted_pairs.mu.size() < 500 ||
      report.real_pairs.mu.size() < 500)
    throw DataError("alignment fit needs at least 500 pairs per side");
  // Temporal-variance scatter grows with the variance itself, so both sides
  // get the proportional inlier band; its small skew-induced shrinkage is
  // common to the two fits and cancels in every compared ratio.
  RansacConfig config;
  config.relative_threshold = 0.14;
  report.real_line = fit_gain(report.real_pairs, real_stats.gain_db, config,
                              derive_stream(seed, kFitRealSalt));
  report.converted_line =
      fit_gain(report.converted_pairs, conv_stats.gain_db, config,
               derive_stream(seed, kFitConvSalt));
  report.slope_rel_err =
      std::fabs(report.converted_line.slope - report.real_line.slope) /
      report.real_line.slope;
  report.intercept_rel_err =
      std::fabs(report.converted_line.intercept - report.real_line.intercept) /
      std::fabs(report.real_line.intercept);
  report.ks =
      ks_two_sample(standardized_residuals(report.real_pairs, report.real_line),
                    standardized_residuals(report.converted_pairs,
                                           report.real_line));
  return report;
}

}  // namespace

ConversionMethod conversion_from_string(const std::string& name) {
  if (name == "ours") return ConversionMethod::kOurs;
  if (name == "wo_prior") return ConversionMethod::kWoPrior;
  if (name == "none") return ConversionMethod::kNone;
  throw DataError("unknown conversion method: " + name);
}

std::string conversion_to_string(ConversionMethod method) {
  switch (method) {
    case ConversionMethod::kOurs:
      return "ours";
    case ConversionMethod::kWoPrior:
      return "wo_prior";
    default:
      return "none";
  }
}

AlignmentReport alignment_experiment(const NoiseModel& model,
                                     const SensorSpec& sensor,
                                     const SceneMap& scene, GainValue gain,
                                     double contrast, ConversionMethod method,
                                     int n_frames,
                                     const std::vector<PatchRegion>& regions,
                                     std::uint64_t seed, unsigned threads) {
  if (!(contrast > 0.0) || contrast > 1.0)
    throw DataError("contrast must lie in (0, 1]");
  if (n_frames < 50) throw DataError("alignment needs at least 50 frames");

  Burst source = capture_burst(scene, gain, sensor, n_frames,
                               derive_stream(seed, kSourceSalt), threads);

  AugmentSpec spec;
  spec.p_c_base = contrast;
  spec.p_c = {contrast, contrast, contrast};

  std::uint64_t convert_key = derive_stream(seed, kConvertSalt);
  std::size_t clipped = 0;
  Burst converted;
  converted.frames.reserve(source.frames.size());
  for (std::size_t i = 0; i < source.frames.size(); ++i) {
    std::uint64_t key = derive_stream(convert_key, i);
    AugmentStats stats;
    switch (method) {
      case ConversionMethod::kOurs:
        converted.frames.push_back(exposure_gain_shift(
            source.frames[i], model, contrast, 1.0, key, &stats, threads));
        break;
      case ConversionMethod::kWoPrior:
        converted.frames.push_back(wo_prior_color_jitter(
            source.frames[i], model, spec, key, &stats, threads));
        break;
      case ConversionMethod::kNone:
        converted.frames.push_back(
            naive_color_jitter(source.frames[i], spec, threads));
        break;
    }
    clipped += stats.clipped_variance_pixels;
  }

  Burst real =
      capture_burst(scale_scene(scene, contrast), gain, sensor, n_frames,
                    derive_stream(seed, kRealSalt), threads);

  AlignmentReport report = compare_bursts(converted, real, regions, seed,
                                          threads);
  report.method = conversion_to_string(method);
  char label[64];
  std::snprintf(label, sizeof(label), "contrast x%g", contrast);
  report.conversion = label;
  report.clipped_variance_pixels = clipped;
  return report;
}

AlignmentReport blur_alignment_experiment(
    const NoiseModel& model, const SensorSpec& sensor, const SceneMap& scene,
    GainValue gain, const BlurKernel& kernel, BlurMode mode, int n_frames,
    const std::vector<PatchRegion>& regions, std::uint64_t seed,
    unsigned threads) {
  if (n_frames < 50) throw DataError("alignment needs at least 50 frames");
  validate_kernel(kernel);

  Burst source = capture_burst(scene, gain, sensor, n_frames,
                               derive_stream(seed, kSourceSalt), threads);

  std::uint64_t convert_key = derive_stream(seed, kConvertSalt);
  Burst converted;
  converted.frames.reserve(source.frames.size());
  for (std::size_t i = 0; i < source.frames.size(); ++i) {
    std::uint64_t key = derive_stream(convert_key, i);
    if (mode == BlurMode::kNoiseAccounted) {
      converted.frames.push_back(noise_accounted_blur(
          source.frames[i], model, kernel, key, nullptr, threads));
    } else {
      converted.frames.push_back(naive_blur(source.frames[i], kernel, threads));
    }
  }

  std::uint64_t real_key = derive_stream(seed, kRealSalt);
  Burst real;
  real.frames.reserve(std::size_t(n_frames));
  for (int i = 0; i < n_frames; ++i)
    real.frames.push_back(capture_motion_blur(
        scene, gain, sensor, kernel, derive_stream(real_key, std::uint64_t(i)),
        threads));

  AlignmentReport report = compare_bursts(converted, real, regions, seed,
                                          threads);
  report.method =
      mode == BlurMode::kNoiseAccounted ? "noise_accounted" : "naive";
  char label[64];
  std::snprintf(label, sizeof(label), "blur %zu taps",
                kernel.taps.size());
  report.conversion = label;
  return report;
}

NormalityReport normality_report(const Burst& burst,
                                 const std::vector<PatchRegion>& regions,
                                 int n_buckets, unsigned threads) {
  NormalityReport report;
  report.pixels = pixel_normality(burst, regions, threads);
  report.sweep = bucket_normality(report.pixels, n_buckets);
  return report;
}

void write_alignment_report(const AlignmentReport& report,
                            const std::string& json_path,
                            const std::string& csv_path) {
  json j = {{"method", report.method},
            {"conversion", report.conversion},
            {"real_line", line_to_json(report.real_line)},
            {"converted_line", line_to_json(report.converted_line)},
            {"slope_rel_err", report.slope_rel_err},
            {"intercept_rel_err", report.intercept_rel_err},
            {"ks_statistic", report.ks.statistic},
            {"ks_p_value", report.ks.p_value},
            {"clipped_variance_pixels", report.clipped_variance_pixels}};
  std::ofstream out(json_path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + json_path);
  out << j.dump(2) << "\n";

  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw DataError("cannot open for writing: " + csv_path);
  csv << "mu,var,source\n";
  for (std::size_t i = 0; i < report.real_pairs.mu.size(); ++i)
    csv << format_double(report.real_pairs.mu[i]) << ","
        << format_double(report.real_pairs.var[i]) << ",real\n";
  for (std::size_t i = 0; i < report.converted_pairs.mu.size(); ++i)
    csv << format_double(report.converted_pairs.mu[i]) << ","
        << format_double(report.converted_pairs.var[i]) << ",converted\n";
  if (!csv) throw DataError("short write: " + csv_path);
}

void write_normality_report(const NormalityReport& report,
                            const std::string& json_path,
                            const std::string& csv_path) {
  json buckets = json::array();
  for (const NormalityBucket& b : report.sweep.buckets)
    buckets.push_back({{"mean_lo", b.mean_lo},
                       {"mean_hi", b.mean_hi},
                       {"count", b.count},
                       {"pass_fraction", b.pass_fraction},
                       {"sparse_count", b.sparse_count}});
  json j = {{"buckets", buckets},
            {"tested", report.sweep.tested},
            {"constant_excluded", report.sweep.constant_excluded},
            {"overall_pass_fraction", report.sweep.overall_pass_fraction}};
  std::ofstream out(json_path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + json_path);
  out << j.dump(2) << "\n";

  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw DataError("cannot open for writing: " + csv_path);
  csv << "mean,p_value,distinct\n";
  for (std::size_t i = 0; i < report.pixels.mean.size(); ++i)
    csv << format_double(report.pixels.mean[i]) << ","
        << format_double(report.pixels.p_value[i]) << ","
        << report.pixels.distinct[i] << "\n";
  if (!csv) throw DataError("short write: " + csv_path);
}

std::vector<BenchEntry> bench(int width, int height, int repetitions,
                              unsigned threads, std::uint64_t seed) {
  if (repetitions < 3) throw DataError("bench needs at least 3 repetitions");
  if (width < 16 || height < 16 || width % 2 || height % 2)
    throw DataError("bench frame dimensions must be even and >= 16");

  SensorSpec sensor;
  SceneMap scene;
  scene.width = width;
  scene.height = height;
  scene.mean_photons.resize(std::size_t(width) * height);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      scene.mean_photons[std::size_t(r) * width + c] =
          5.0 + 1500.0 * double(c) / double(width);

  NoiseModel model;
  model.alpha = sensor.alpha;
  model.sigma_d2 = sensor.sigma_d2;
  model.sigma_r2 = sensor.sigma_r2;

  GainValue gain{12.0};
  RawFrame frame = capture(scene, gain, sensor, derive_stream(seed, 1), threads);

  AugmentSpec spec;
  spec.p_c = {0.4, 0.5, 0.6};
  spec.p_c_base = 0.5;
  spec.hue_applied = true;
  spec.p_b_hat = 0.05;
  spec.blur_applied = true;
  spec.blur = BlurKernel::uniform_line(2, true);
  spec.geometric_applied = true;
  spec.shift_x = 4;
  spec.shift_y = -2;
  spec.scale = 1.02;
  ToneCurve curve;

  struct Op {
    std::string name;
    std::function<void(std::uint64_t)> run;
  };
  std::vector<Op> ops;
  ops.push_back({"capture", [&](std::uint64_t key) {
                   capture(scene, gain, sensor, key, threads);
                 }});
  ops.push_back({"exposure_gain_shift", [&](std::uint64_t key) {
                   exposure_gain_shift(frame, model, 0.5, 1.0, key, nullptr,
                                       threads);
                 }});
  ops.push_back({"color_jitter", [&](std::uint64_t key) {
                   color_jitter(frame, model, spec, key, nullptr, threads);
                 }});
  ops.push_back({"wo_prior_color_jitter", [&](std::uint64_t key) {
                   wo_prior_color_jitter(frame, model, spec, key, nullptr,
                                         threads);
                 }});
  ops.push_back({"noise_accounted_blur", [&](std::uint64_t key) {
                   noise_accounted_blur(frame, model, spec.blur, key, nullptr,
                                        threads);
                 }});
  ops.push_back({"naive_blur", [&](std::uint64_t) {
                   naive_blur(frame, spec.blur, threads);
                 }});
  ops.push_back({"geometric", [&](std::uint64_t) { geometric(frame, spec); }});
  ops.push_back({"ksigma_forward", [&](std::uint64_t) {
                   ksigma_forward(frame, model);
                 }});
  ops.push_back({"variance_map", [&](std::uint64_t) {
                   variance_map(frame, model);
                 }});
  ops.push_back({"develop", [&](std::uint64_t) {
                   develop(frame, curve, threads);
                 }});

  double megapixels = double(width) * double(height) / 1e6;
  std::vector<BenchEntry> entries;
  std::uint64_t key = derive_stream(seed, 2);
  for (const Op& op : ops) {
    std::vector<double> times_ms;
    for (int rep = 0; rep < repetitions; ++rep) {
      auto start = std::chrono::steady_clock::now();
      op.run(derive_stream(key, std::uint64_t(rep)));
      auto stop = std::chrono::steady_clock::now();
      times_ms.push_back(
          std::chrono::duration<double, std::milli>(stop - start).count());
    }
    std::sort(times_ms.begin(), times_ms.end());
    BenchEntry entry;
    entry.op = op.name;
    entry.median_ms = times_ms[times_ms.size() / 2];
    entry.p95_ms = times_ms[std::min(
        times_ms.size() - 1, std::size_t(std::ceil(0.95 * times_ms.size())))];
    entry.megapixels_per_s =
        entry.median_ms > 0.0 ? megapixels / (entry.median_ms / 1000.0) : 0.0;
    entries.push_back(entry);
    key = derive_stream(key, 0x5245ull);
  }
  return entries;
}

void write_bench_report(const std::vector<BenchEntry>& entries,
                        const std::string& json_path) {
  json arr = json::array();
  for (const BenchEntry& e : entries)
    arr.push_back({{"op", e.op},
                   {"median_ms", e.median_ms},
                   {"p95_ms", e.p95_ms},
                   {"megapixels_per_s", e.megapixels_per_s}});
  std::ofstream out(json_path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + json_path);
  out << arr.dump(2) << "\n";
}

}  // namespace rawaug
