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
//
// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.  Every tolerance is pinned here as a named constant.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rawaug/augment.hpp"
#include "rawaug/calibration.hpp"
#include "rawaug/error.hpp"
#include "rawaug/frame_io.hpp"
#include "rawaug/isp.hpp"
#include "rawaug/noise_model.hpp"
#include "rawaug/raw_frame.hpp"
#include "rawaug/rng.hpp"
#include "rawaug/sensor_sim.hpp"
#include "rawaug/stats.hpp"
#include "rawaug/validate.hpp"

namespace fs = std::filesystem;
using namespace rawaug;

namespace {

constexpr unsigned kThreads = 4;

// Pinned tolerances.
constexpr double kTolCalibration = 0.05;   // relative error per parameter
constexpr double kMinLineR2 = 0.98;        // per-gain photon-transfer fit
constexpr double kMinAlphaR2 = 0.999;      // slopes vs gain agreement
constexpr double kMinFloorR2 = 0.99;       // intercepts vs gain^2 agreement
constexpr double kMaxCalSeconds = 60.0;    // single-threaded calibration budget
constexpr double kRelativeBand = 0.14;     // inlier band, fraction of predicted
constexpr int kFitIterations = 2000;       // consensus candidate draws
constexpr double kMinBrightPass = 0.90;    // normality pass rate, mean > 100 DN
constexpr double kBrightMeanCut = 100.0;   // DN above black
constexpr double kMinKsP = 0.01;           // capture-vs-law KS p-value
constexpr double kTolAlignment = 0.05;     // converted-vs-real line agreement
constexpr double kBaselineExcess = 0.20;   // how far off the baselines must land
constexpr double kNaiveFloorLo = 0.18;     // plain 5-tap blur shrinks the floor
constexpr double kNaiveFloorHi = 0.22;     //   to sum w^2 = 0.2 of the original
constexpr double kTolVariance = 0.02;      // sampled vs closed-form variance
constexpr double kToneTol = 1e-12;         // tone curve identities
constexpr double kStabilizerTol = 1e-11;   // DN after inverse(forward(x))

int g_failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s: %s%s%s\n", ok ? "PASS" : "FAIL", name,
              detail.empty() ? "" : " (", detail.empty() ? "" : (detail + ")").c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

template <typename Fn>
void criterion(const char* name, Fn fn) {
  try {
    std::pair<bool, std::string> r = fn();
    report(name, r.first, r.second);
  } catch (const std::exception& e) {
    report(name, false, std::string("exception: ") + e.what());
  }
}

double rel_err(double estimate, double truth) {
  return std::abs(estimate - truth) / std::abs(truth);
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// Brightest-patch level as a fraction of the usable range, chosen per gain so
// the top patch stays clear of the white level at +-4 sigma.
double bright_fraction(double gain_db) {
  if (gain_db >= 24.0) return 0.5;
  if (gain_db >= 12.0) return 0.75;
  return 0.85;
}

double chart_illumination(double gain_db, double alpha, double span,
                          double fraction) {
  return fraction * span / (GainValue{gain_db}.linear() * alpha * 2000.0);
}

SceneMap flat_scene(int width, int height, double photons) {
  SceneMap scene;
  scene.width = width;
  scene.height = height;
  scene.mean_photons.assign(std::size_t(width) * height, photons);
  return scene;
}

double region_variance(const RawFrame& frame, int margin) {
  double sum = 0.0;
  std::size_t n = 0;
  for (int r = margin; r < frame.height - margin; ++r)
    for (int c = margin; c < frame.width - margin; ++c) {
      sum += frame.at(r, c);
      ++n;
    }
  double mean = sum / double(n);
  double ss = 0.0;
  for (int r = margin; r < frame.height - margin; ++r)
    for (int c = margin; c < frame.width - margin; ++c) {
      double d = frame.at(r, c) - mean;
      ss += d * d;
    }
  return ss / double(n - 1);
}

NoiseModel reference_model() {
  NoiseModel m;
  m.alpha = 1.2;
  m.sigma_d2 = 6.0;
  m.sigma_r2 = 25.0;
  return m;
}

// 12-bit sensor with a generous black offset: at the highest calibration
// gain the dimmest patches keep a > 6 sigma margin to the bottom rail, so no
// burst sample is censored and every chart pixel contributes a clean pair.
SensorSpec reference_sensor() {
  SensorSpec sensor;
  sensor.bit_depth = 12;
  sensor.black_level = 256.0;
  sensor.white_level = 4095.0;
  return sensor;
}

RansacConfig proportional_band() {
  RansacConfig config;
  config.relative_threshold = kRelativeBand;
  config.iterations = kFitIterations;
  return config;
}

// --- criterion 1: calibration on the reference sensor ----------------------

std::pair<bool, std::string> calibration_reference() {
  auto start = std::chrono::steady_clock::now();
  SensorSpec sensor = reference_sensor();
  double span = sensor.white_level - sensor.black_level;
  std::vector<Burst> bursts;
  std::uint64_t tag = 0;
  for (double db : {6.0, 12.0, 24.0}) {
    double illum = chart_illumination(db, sensor.alpha, span, bright_fraction(db));
    for (double dim : {1.0, 0.35}) {
      SceneMap scene = color_checker_scene(32, illum * dim);
      bursts.push_back(capture_burst(scene, GainValue{db}, sensor, 100,
                                     derive_stream(201, tag++), 1));
    }
  }
  NoiseModel model =
      calibrate(bursts, chart_regions(32), proportional_band(), 202, 1);
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  double ea = rel_err(model.alpha, sensor.alpha);
  double ed = rel_err(model.sigma_d2, sensor.sigma_d2);
  double er = rel_err(model.sigma_r2, sensor.sigma_r2);
  double min_r2 = 1.0;
  for (const GainLine& line : model.per_gain) min_r2 = std::min(min_r2, line.r2);
  bool ok = ea <= kTolCalibration && ed <= kTolCalibration &&
            er <= kTolCalibration && min_r2 >= kMinLineR2 &&
            model.alpha_r2 >= kMinAlphaR2 && model.read_noise_r2 >= kMinFloorR2 &&
            seconds <= kMaxCalSeconds;
  return {ok, fmt("alpha %.4f/%.4f d2 %.3f/%.3f r2 %.3f/%.3f line_r2 %.4f "
                  "alpha_r2 %.5f floor_r2 %.5f single-thread %.1fs",
                  model.alpha, ea, model.sigma_d2, ed, model.sigma_r2, er,
                  min_r2, model.alpha_r2, model.read_noise_r2, seconds)};
}

// --- criterion 2: calibration across a parameter grid ----------------------

std::pair<bool, std::string> calibration_grid() {
  struct GridCase {
    double alpha, sigma_d2, sigma_r2;
  };
  // Covers both endpoints of each parameter range.
  const std::array<GridCase, 10> grid = {{{0.5, 4.0, 16.0},
                                          {0.8, 20.0, 100.0},
                                          {1.0, 12.0, 49.0},
                                          {1.2, 6.0, 25.0},
                                          {1.6, 1.0, 40.0},
                                          {2.0, 10.0, 9.0},
                                          {2.5, 15.0, 64.0},
                                          {3.0, 5.0, 4.0},
                                          {3.5, 8.0, 81.0},
                                          {4.0, 18.0, 36.0}}};
  double worst = 0.0;
  int worst_case = -1;
  std::uint64_t tag = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SensorSpec sensor = reference_sensor();
    sensor.alpha = grid[i].alpha;
    sensor.sigma_d2 = grid[i].sigma_d2;
    sensor.sigma_r2 = grid[i].sigma_r2;
    double span = sensor.white_level - sensor.black_level;
    std::vector<Burst> bursts;
    // Unity gain anchors the floor split: the post-gain share of the 0 dB
    // intercept is large, so the smallest grid floors stay identifiable.
    for (double db : {0.0, 6.0, 12.0, 24.0}) {
      double illum =
          chart_illumination(db, sensor.alpha, span, bright_fraction(db));
      for (double dim : {1.0, 0.35}) {
        SceneMap scene = color_checker_scene(32, illum * dim);
        bursts.push_back(capture_burst(scene, GainValue{db}, sensor, 100,
                                       derive_stream(301, tag++), kThreads));
      }
    }
    NoiseModel model = calibrate(bursts, chart_regions(32), proportional_band(),
                                 derive_stream(302, i), kThreads);
    double err = std::max({rel_err(model.alpha, sensor.alpha),
                           rel_err(model.sigma_d2, sensor.sigma_d2),
                           rel_err(model.sigma_r2, sensor.sigma_r2)});
    if (err > worst) {
      worst = err;
      worst_case = int(i);
    }
  }
  return {worst <= kTolCalibration,
          fmt("worst rel err %.4f (case %d)", worst, worst_case)};
}

// --- criterion 3: temporal normality of bright pixels ----------------------

std::pair<bool, std::string> temporal_normality() {
  SensorSpec sensor;
  double span = sensor.white_level - sensor.black_level;
  double illum = chart_illumination(6.0, sensor.alpha, span, 0.85);
  SceneMap scene = color_checker_scene(32, illum);
  Burst burst =
      capture_burst(scene, GainValue{6.0}, sensor, 100, 401, kThreads);
  PixelNormality pixels = pixel_normality(burst, chart_regions(32), kThreads);
  std::size_t bright = 0, pass = 0;
  for (std::size_t i = 0; i < pixels.mean.size(); ++i) {
    if (pixels.mean[i] <= kBrightMeanCut) continue;
    ++bright;
    if (pixels.p_value[i] > 0.05) ++pass;
  }
  double rate = bright ? double(pass) / double(bright) : 0.0;

  // A quiet sensor drives quantized series down to a handful of levels; the
  // sweep must annotate those pixels instead of treating them as failures.
  SensorSpec quiet;
  quiet.alpha = 1.0;
  quiet.sigma_d2 = 0.0;
  quiet.sigma_r2 = 0.09;
  Burst quiet_burst = capture_burst(flat_scene(16, 16, 0.25), GainValue{0.0},
                                    quiet, 30, 402, kThreads);
  PatchRegion full;
  full.rows = 16;
  full.cols = 16;
  NormalitySweep sweep = normality_sweep(quiet_burst, {full}, 2, kThreads);
  int sparse = 0;
  for (const NormalityBucket& bucket : sweep.buckets) sparse += bucket.sparse_count;

  bool ok = bright > 1000 && rate >= kMinBrightPass && sparse > 0;
  return {ok, fmt("bright pixels %zu pass rate %.4f sparse flagged %d", bright,
                  rate, sparse)};
}

// --- criterion 4: capture statistics match the closed-form law -------------

std::pair<bool, std::string> capture_law() {
  SensorSpec sensor;
  sensor.quantize = false;
  double alpha = sensor.alpha;
  bool ok = true;
  double min_p = 1.0;
  std::string fail;
  std::uint64_t tag = 0;
  for (double db : {6.0, 12.0, 24.0}) {
    double g = GainValue{db}.linear();
    for (double ubar : {30.0, 100.0, 1000.0}) {
      RawFrame f = capture(flat_scene(100, 100, ubar), GainValue{db}, sensor,
                           derive_stream(501, tag), kThreads);
      double mu = g * alpha * ubar + sensor.black_level;
      double var = g * g * alpha * alpha * ubar + g * g * sensor.sigma_d2 +
                   sensor.sigma_r2;
      // Surrogate sample of the same size drawn from the closed-form law.
      std::vector<double> surrogate(f.pixels.size());
      CounterRng rng(derive_stream(502, tag), 0);
      double sd = std::sqrt(var);
      for (double& s : surrogate) s = mu + sd * rng.next_gaussian();
      TestResult r = ks_two_sample(f.pixels, surrogate);
      min_p = std::min(min_p, r.p_value);
      if (r.p_value <= kMinKsP) {
        ok = false;
        fail += fmt(" [%gdB u=%g p=%.4g]", db, ubar, r.p_value);
      }
      ++tag;
    }
  }
  return {ok, fmt("min KS p %.4g%s", min_p, fail.c_str())};
}

// --- criterion 5: contrast conversion vs real captures ---------------------

std::pair<bool, std::string> contrast_alignment() {
  NoiseModel model = reference_model();
  SensorSpec sensor = reference_sensor();
  double span = sensor.white_level - sensor.black_level;
  double illum = chart_illumination(6.0, sensor.alpha, span, 0.85);
  SceneMap scene = color_checker_scene(32, illum);
  GainValue gain{6.0};
  std::vector<PatchRegion> regions = chart_regions(32);

  auto run = [&](double contrast, ConversionMethod method, std::uint64_t tag) {
    return alignment_experiment(model, sensor, scene, gain, contrast, method,
                                150, regions, derive_stream(601, tag),
                                kThreads);
  };

  AlignmentReport ours_lo = run(0.1, ConversionMethod::kOurs, 0);
  AlignmentReport ours_hi = run(0.5, ConversionMethod::kOurs, 1);
  AlignmentReport wp_lo = run(0.1, ConversionMethod::kWoPrior, 2);
  AlignmentReport wp_hi = run(0.5, ConversionMethod::kWoPrior, 3);
  AlignmentReport none_lo = run(0.1, ConversionMethod::kNone, 4);
  AlignmentReport none_hi = run(0.5, ConversionMethod::kNone, 5);

  bool ours_ok = ours_lo.slope_rel_err <= kTolAlignment &&
                 ours_lo.intercept_rel_err <= kTolAlignment &&
                 ours_hi.slope_rel_err <= kTolAlignment &&
                 ours_hi.intercept_rel_err <= kTolAlignment;
  // Adding the full target-condition noise looks fine at strong dimming
  // (carried noise scales by c^2) but overshoots the floor at mild dimming.
  bool wp_ok = wp_lo.intercept_rel_err <= kTolAlignment &&
               wp_hi.intercept_rel_err > kBaselineExcess &&
               wp_hi.converted_line.intercept > wp_hi.real_line.intercept;
  bool none_ok = none_lo.converted_line.slope < none_lo.real_line.slope &&
                 none_lo.slope_rel_err > kBaselineExcess &&
                 none_hi.converted_line.slope < none_hi.real_line.slope &&
                 none_hi.slope_rel_err > kBaselineExcess;
  bool ok = ours_ok && wp_ok && none_ok;
  return {ok, fmt("ours s/i x0.1 %.4f/%.4f x0.5 %.4f/%.4f | wo_prior i x0.1 "
                  "%.4f x0.5 %.4f | none s x0.5 %.4f",
                  ours_lo.slope_rel_err, ours_lo.intercept_rel_err,
                  ours_hi.slope_rel_err, ours_hi.intercept_rel_err,
                  wp_lo.intercept_rel_err, wp_hi.intercept_rel_err,
                  none_hi.slope_rel_err)};
}

// --- criterion 6: blur conversion vs real motion blur ----------------------

std::pair<bool, std::string> blur_alignment() {
  NoiseModel model = reference_model();
  SensorSpec sensor;
  double span = sensor.white_level - sensor.black_level;
  double illum = chart_illumination(6.0, sensor.alpha, span, 0.85);
  SceneMap scene = color_checker_scene(32, illum);
  GainValue gain{6.0};
  BlurKernel kernel = BlurKernel::uniform_line(2, true);
  auto regions = chart_regions(32);

  AlignmentReport accounted =
      blur_alignment_experiment(model, sensor, scene, gain, kernel,
                                BlurMode::kNoiseAccounted, 100, regions, 701,
                                kThreads);
  AlignmentReport naive =
      blur_alignment_experiment(model, sensor, scene, gain, kernel,
                                BlurMode::kNaive, 100, regions, 702, kThreads);
  double ratio = naive.converted_line.intercept / naive.real_line.intercept;
  bool ok = accounted.slope_rel_err <= kTolAlignment &&
            accounted.intercept_rel_err <= kTolAlignment &&
            ratio >= kNaiveFloorLo && ratio <= kNaiveFloorHi;
  return {ok, fmt("accounted s/i %.4f/%.4f naive floor ratio %.4f",
                  accounted.slope_rel_err, accounted.intercept_rel_err, ratio)};
}

// --- criterion 7: operator variance matches the closed form ----------------

std::pair<bool, std::string> operator_variance() {
  NoiseModel model = reference_model();
  SensorSpec sensor;
  sensor.quantize = false;
  GainValue gain{6.0};
  double g = gain.linear();
  double a = g * model.alpha;
  double m = a * 200.0;  // black-subtracted mean of the source condition
  double b = g * g * model.sigma_d2 + model.sigma_r2;
  SceneMap scene = flat_scene(1024, 1024, 200.0);
  RawFrame src = capture(scene, gain, sensor, 801, kThreads);

  struct Setting {
    const char* name;
    RawFrame frame;
    double expected;
  };
  std::vector<Setting> settings;

  settings.push_back({"shift(0.5,1)",
                      exposure_gain_shift(src, model, 0.5, 1.0, 802, nullptr,
                                          kThreads),
                      a * (0.5 * m) + b});
  settings.push_back(
      {"shift(0.25,2)",
       exposure_gain_shift(src, model, 0.25, 2.0, 803, nullptr, kThreads),
       2.0 * a * (0.5 * m) + (2.0 * g) * (2.0 * g) * model.sigma_d2 +
           model.sigma_r2});

  AugmentSpec jitter;
  jitter.p_c_base = 0.3;
  jitter.p_c = {0.3, 0.3, 0.3};
  settings.push_back({"wo_prior(0.3)",
                      wo_prior_color_jitter(src, model, jitter, 804, nullptr,
                                            kThreads),
                      0.09 * (a * m + b) + (a * 0.3 * m + b)});

  BlurKernel kernel = BlurKernel::uniform_line(2, true);
  settings.push_back({"accounted_blur",
                      noise_accounted_blur(src, model, kernel, 805, nullptr,
                                           kThreads),
                      a * m + b});
  settings.push_back({"naive_blur", naive_blur(src, kernel, kThreads),
                      kernel.weight_square_sum() * (a * m + b)});

  bool ok = true;
  double worst = 0.0;
  std::string detail;
  for (const Setting& s : settings) {
    double sampled = region_variance(s.frame, 8);
    double err = rel_err(sampled, s.expected);
    worst = std::max(worst, err);
    if (err > kTolVariance) {
      ok = false;
      detail += fmt(" [%s err %.4f]", s.name, err);
    }
  }
  return {ok, fmt("worst rel err %.4f%s", worst, detail.c_str())};
}

// --- criterion 8: exact identities and round trips --------------------------

std::pair<bool, std::string> exact_identities() {
  NoiseModel model = reference_model();
  SensorSpec sensor;
  double span = sensor.white_level - sensor.black_level;
  SceneMap scene =
      color_checker_scene(16, chart_illumination(6.0, sensor.alpha, span, 0.85));
  RawFrame frame = capture(scene, GainValue{6.0}, sensor, 901, kThreads);

  AugmentSpec id;
  id.seed = 902;
  bool identity_ok = id.identity();
  RawFrame ours = augment_frame(frame, model, id, AugmentMode::kOurs, nullptr,
                                kThreads);
  RawFrame naive = augment_frame(frame, model, id, AugmentMode::kNaive, nullptr,
                                 kThreads);
  identity_ok = identity_ok && ours.pixels == frame.pixels &&
                naive.pixels == frame.pixels;

  RawFrame fwd = ksigma_forward(frame, model);
  RawFrame back = ksigma_inverse(fwd, model);
  double max_diff = 0.0;
  for (std::size_t i = 0; i < frame.pixels.size(); ++i)
    max_diff = std::max(max_diff, std::abs(back.pixels[i] - frame.pixels[i]));
  bool stabilizer_ok = max_diff <= kStabilizerTol;

  fs::path dir = fs::temp_directory_path() / "rawaug_acceptance_io";
  fs::remove_all(dir);
  fs::create_directories(dir);
  save_frame(frame, (dir / "frame").string());
  RawFrame frame2 = load_frame((dir / "frame").string());
  bool frame_ok = frame2.pixels == frame.pixels &&
                  frame2.width == frame.width && frame2.cfa == frame.cfa &&
                  frame2.gain_db == frame.gain_db;
  save_noise_model(model, (dir / "model.json").string());
  NoiseModel model2 = load_noise_model((dir / "model.json").string());
  bool model_ok = model2.alpha == model.alpha &&
                  model2.sigma_d2 == model.sigma_d2 &&
                  model2.sigma_r2 == model.sigma_r2;
  save_scene(scene, (dir / "scene").string());
  SceneMap scene2 = load_scene((dir / "scene").string());
  bool scene_ok = scene2.mean_photons == scene.mean_photons &&
                  scene2.width == scene.width;
  auto regions = chart_regions(16);
  save_regions(regions, (dir / "regions.json").string());
  auto regions2 = load_regions((dir / "regions.json").string());
  bool regions_ok = regions2.size() == regions.size();
  for (std::size_t i = 0; i < regions.size() && regions_ok; ++i)
    regions_ok = regions2[i].row == regions[i].row &&
                 regions2[i].col == regions[i].col &&
                 regions2[i].rows == regions[i].rows &&
                 regions2[i].cols == regions[i].cols;
  fs::remove_all(dir);

  bool ok = identity_ok && stabilizer_ok && frame_ok && model_ok && scene_ok &&
            regions_ok;
  return {ok, fmt("identity %d stabilizer max diff %.3g io %d%d%d%d",
                  int(identity_ok), max_diff, int(frame_ok), int(model_ok),
                  int(scene_ok), int(regions_ok))};
}

// --- criterion 9: CLI determinism -------------------------------------------

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<missing " + path.string() + ">";
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::pair<bool, std::string> cli_determinism() {
  const char* cli = std::getenv("RAWAUG_CLI");
  if (!cli) return {false, "RAWAUG_CLI not set"};
  fs::path w = fs::temp_directory_path() / "rawaug_acceptance_cli";
  fs::remove_all(w);
  fs::create_directories(w);

  {
    std::ofstream params(w / "params.json");
    params << R"({"patch_size":8,"illumination":0.16,"gain_db":6,"n_frames":12})";
  }
  {
    std::ofstream model(w / "model.json");
    model << R"({"alpha":1.2,"sigma_d2":6.0,"sigma_r2":25.0})";
  }

  auto sh = [&](const std::string& args) {
    std::string cmd = std::string(cli) + " " + args + " >> " +
                      (w / "log.txt").string() + " 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  auto same_bursts = [&](const char* lhs, const char* rhs, int frames) {
    for (int i = 0; i < frames; ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%04d.raw16", i);
      if (read_bytes(w / lhs / name) != read_bytes(w / rhs / name))
        return false;
    }
    return true;
  };

  std::string params = (w / "params.json").string();
  std::string model = (w / "model.json").string();
  bool exit_ok = true;
  exit_ok &= sh("--seed 11 --threads 1 simulate burst --params " + params +
                " --out " + (w / "a").string()) == 0;
  exit_ok &= sh("--seed 11 --threads 4 simulate burst --params " + params +
                " --out " + (w / "b").string()) == 0;
  exit_ok &= sh("--seed 13 --threads 1 augment --in " + (w / "a").string() +
                " --model " + model + " --mode ours --out " +
                (w / "c").string()) == 0;
  exit_ok &= sh("--seed 13 --threads 3 augment --in " + (w / "a").string() +
                " --model " + model + " --mode ours --out " +
                (w / "d").string()) == 0;
  exit_ok &= sh("--seed 13 --threads 1 augment --in " + (w / "a").string() +
                " --model " + model + " --mode ours --out " +
                (w / "e").string()) == 0;
  exit_ok &= sh("develop --in " + (w / "c" / "frame_0000").string() +
                " --out " + (w / "frame.ppm").string()) == 0;

  bool capture_same = same_bursts("a", "b", 12);
  bool augment_same = same_bursts("c", "d", 12) && same_bursts("c", "e", 12) &&
                      read_bytes(w / "c" / "specs.json") ==
                          read_bytes(w / "d" / "specs.json");
  bool ppm_ok = fs::exists(w / "frame.ppm");
  bool ok = exit_ok && capture_same && augment_same && ppm_ok;
  if (ok) fs::remove_all(w);
  return {ok, fmt("exits %d capture %d augment %d develop %d", int(exit_ok),
                  int(capture_same), int(augment_same), int(ppm_ok))};
}

// --- criterion 10: tone curves match their closed forms ---------------------

std::pair<bool, std::string> tone_identities() {
  ToneCurve simplest;
  simplest.kind = ToneCurveKind::kSimplest;
  simplest.gamma = 5.0;
  double mid = tone_map(0.5, simplest);
  double mid_err = std::abs(mid - std::pow(0.5, 0.2));

  ToneCurve reduced;
  reduced.kind = ToneCurveKind::kParameterized;
  reduced.gamma = 5.0;
  reduced.knee = 0.0;
  reduced.scale = 1.0;
  double max_diff = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    double x = double(i) / 1000.0;
    max_diff =
        std::max(max_diff, std::abs(tone_map(x, reduced) - tone_map(x, simplest)));
  }
  bool ok = mid_err <= kToneTol && max_diff <= kToneTol;
  return {ok, fmt("midgray err %.3g curve family gap %.3g", mid_err, max_diff)};
}

}  // namespace

int main() {
  criterion("calibration recovers the reference sensor parameters",
            calibration_reference);
  criterion("calibration recovers a 10-point parameter grid", calibration_grid);
  criterion("temporal noise of bright pixels is Gaussian", temporal_normality);
  criterion("capture statistics match the closed-form law", capture_law);
  criterion("noise-accounted contrast stays on the real variance line",
            contrast_alignment);
  criterion("noise-accounted blur preserves the noise floor", blur_alignment);
  criterion("operator output variance matches the closed form",
            operator_variance);
  criterion("identity transforms and IO round trips are exact",
            exact_identities);
  criterion("CLI pipeline is deterministic across threads and runs",
            cli_determinism);
  criterion("tone curves match their closed forms", tone_identities);
  std::printf("%d/10 criteria passed\n", 10 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
