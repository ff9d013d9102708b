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

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rawaug/augment.hpp"
#include "rawaug/calibration.hpp"
#include "rawaug/error.hpp"
#include "rawaug/frame_io.hpp"
#include "rawaug/isp.hpp"
#include "rawaug/noise_model.hpp"
#include "rawaug/parallel.hpp"
#include "rawaug/raw_frame.hpp"
#include "rawaug/rng.hpp"
#include "rawaug/sensor_sim.hpp"
#include "rawaug/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rawaug;

namespace {

constexpr std::uint64_t kSimulateSalt = 0x53494D55ull;  // "SIMU"
constexpr std::uint64_t kSpecSalt = 0x53504543ull;      // "SPEC"
constexpr std::uint64_t kOpSeedSalt = 0x4F505345ull;    // "OPSE"

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

struct SimParams {
  int patch_size = 32;
  double illumination = 1.0;
  double gain_db = 6.0;
  int n_frames = 100;
  SensorSpec sensor;
  int blur_distance = 2;
  bool blur_horizontal = true;
};

SensorSpec sensor_from_json(const json& j, const SensorSpec& defaults) {
  SensorSpec spec = defaults;
  try {
    spec.alpha = j.value("alpha", spec.alpha);
    spec.sigma_d2 = j.value("sigma_d2", spec.sigma_d2);
    spec.sigma_r2 = j.value("sigma_r2", spec.sigma_r2);
    spec.bit_depth = j.value("bit_depth", spec.bit_depth);
    spec.black_level = j.value("black_level", spec.black_level);
    spec.white_level = j.value("white_level", spec.white_level);
    spec.quantize = j.value("quantize", spec.quantize);
    if (j.contains("cfa"))
      spec.cfa = cfa_from_string(j.at("cfa").get<std::string>());
  } catch (const json::exception& e) {
    throw DataError("bad sensor field: " + std::string(e.what()));
  }
  validate_sensor(spec);
  return spec;
}

SimParams parse_sim_params(const json& j) {
  SimParams p;
  try {
    p.patch_size = j.value("patch_size", p.patch_size);
    p.illumination = j.value("illumination", p.illumination);
    p.gain_db = j.value("gain_db", p.gain_db);
    p.n_frames = j.value("n_frames", p.n_frames);
    p.blur_distance = j.value("blur_distance", p.blur_distance);
    p.blur_horizontal = j.value("blur_horizontal", p.blur_horizontal);
  } catch (const json::exception& e) {
    throw DataError("bad simulation field: " + std::string(e.what()));
  }
  p.sensor = sensor_from_json(j, SensorSpec{});
  return p;
}

std::string strip_frame_suffix(std::string path) {
  for (const char* suffix : {".raw16", ".json"}) {
    std::size_t n = std::string(suffix).size();
    if (path.size() > n && path.compare(path.size() - n, n, suffix) == 0)
      return path.substr(0, path.size() - n);
  }
  return path;
}

// A frame base path or a burst directory, handled uniformly.
struct InputFrames {
  bool is_burst = false;
  Burst burst;
};

InputFrames load_input(const std::string& path) {
  InputFrames input;
  if (fs::is_directory(path)) {
    input.is_burst = true;
    input.burst = load_burst(path);
  } else {
    input.burst.frames.push_back(load_frame(strip_frame_suffix(path)));
  }
  return input;
}

void save_output(const InputFrames& input, const Burst& burst,
                 const std::string& out_dir) {
  fs::create_directories(out_dir);
  if (input.is_burst) {
    save_burst(burst, out_dir);
  } else {
    save_frame(burst.frames.front(), (fs::path(out_dir) / "augmented").string());
  }
}

json spec_to_json(const AugmentSpec& spec) {
  json taps = json::array();
  for (const BlurTap& tap : spec.blur.taps)
    taps.push_back(
        {{"drow", tap.drow}, {"dcol", tap.dcol}, {"weight", tap.weight}});
  return {{"p_c_base", spec.p_c_base},
          {"p_c", json::array({spec.p_c[0], spec.p_c[1], spec.p_c[2]})},
          {"hue_applied", spec.hue_applied},
          {"p_b_hat", spec.p_b_hat},
          {"p_g", spec.p_g},
          {"blur_applied", spec.blur_applied},
          {"blur_taps", taps},
          {"geometric_applied", spec.geometric_applied},
          {"shift_x", spec.shift_x},
          {"shift_y", spec.shift_y},
          {"scale", spec.scale},
          {"seed", spec.seed}};
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

RawFrame to_u16_artifact(const RawFrame& frame, const std::vector<double>& values,
                         double scale) {
  RawFrame out = frame;
  out.bit_depth = 16;
  out.black_level = 0.0;
  out.white_level = 65535.0;
  out.pixels.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out.pixels[i] =
        std::clamp(round_half_even(values[i] * scale), 0.0, 65535.0);
  return out;
}

void run_calibrate(const std::vector<std::string>& burst_dirs,
                   const std::string& regions_path, const std::string& out_path,
                   const std::string& report_path, std::uint64_t seed,
                   unsigned threads) {
  std::vector<PatchRegion> regions = load_regions(regions_path);
  std::vector<Burst> bursts;
  for (const std::string& dir : burst_dirs) bursts.push_back(load_burst(dir));
  RansacConfig config;
  NoiseModel model = calibrate(bursts, regions, config, seed, threads);
  save_noise_model(model, out_path);
  if (!report_path.empty()) {
    json lines = json::array();
    for (const GainLine& l : model.per_gain)
      lines.push_back({{"gain_db", l.gain_db},
                       {"slope", l.slope},
                       {"intercept", l.intercept},
                       {"r2", l.r2},
                       {"inlier_fraction", l.inlier_fraction},
                       {"n_pairs", l.n_pairs}});
    write_json_file({{"alpha", model.alpha},
                     {"sigma_d2", model.sigma_d2},
                     {"sigma_r2", model.sigma_r2},
                     {"alpha_r2", model.alpha_r2},
                     {"read_noise_r2", model.read_noise_r2},
                     {"clamped", model.clamped},
                     {"lines", lines}},
                    report_path);
  }
}

void run_simulate(const std::string& kind, const std::string& params_path,
                  const std::string& out_dir, std::uint64_t seed,
                  unsigned threads) {
  SimParams p = parse_sim_params(load_json_file(params_path));
  SceneMap scene = color_checker_scene(p.patch_size, p.illumination);
  fs::create_directories(out_dir);
  std::uint64_t key = derive_stream(seed, kSimulateSalt);
  if (kind == "scene") {
    save_scene(scene, (fs::path(out_dir) / "scene").string());
  } else if (kind == "burst") {
    Burst burst = capture_burst(scene, GainValue{p.gain_db}, p.sensor,
                                p.n_frames, key, threads);
    save_burst(burst, out_dir);
    save_regions(chart_regions(p.patch_size),
                 (fs::path(out_dir) / "regions.json").string());
  } else {
    BlurKernel kernel =
        BlurKernel::uniform_line(p.blur_distance, p.blur_horizontal);
    RawFrame frame = capture_motion_blur(scene, GainValue{p.gain_db}, p.sensor,
                                         kernel, key, threads);
    save_frame(frame, (fs::path(out_dir) / "blurred").string());
  }
}

void run_augment(const std::string& in_path, const std::string& model_path,
                 const std::string& config_path, const std::string& mode,
                 const std::string& out_dir, std::uint64_t seed,
                 unsigned threads) {
  InputFrames input = load_input(in_path);
  NoiseModel model = load_noise_model(model_path);
  const Burst& frames = input.burst;

  if (mode == "ksigma") {
    double g = GainValue{frames.frames.front().gain_db}.linear();
    double k = g * model.alpha;
    double b = g * g * model.sigma_d2 + model.sigma_r2;
    const RawFrame& first = frames.frames.front();
    double fmax = (first.white_level - first.black_level) / k + b / (k * k);
    double scale = 65535.0 / fmax;
    Burst out;
    for (const RawFrame& frame : frames.frames) {
      RawFrame fwd = ksigma_forward(frame, model);
      out.frames.push_back(to_u16_artifact(frame, fwd.pixels, scale));
    }
    save_output(input, out, out_dir);
    write_json_file({{"k", k}, {"b", b}, {"scale", scale}},
                    (fs::path(out_dir) / "transform.json").string());
    return;
  }
  if (mode == "varmap") {
    Burst out;
    for (const RawFrame& frame : frames.frames)
      out.frames.push_back(to_u16_artifact(frame, variance_map(frame, model),
                                           1.0));
    save_output(input, out, out_dir);
    return;
  }

  AugmentMode op_mode = augment_mode_from_string(mode);
  AugmentConfig config;
  if (!config_path.empty()) config = load_augment_config(config_path);
  std::uint64_t spec_root = derive_stream(seed, kSpecSalt);
  std::uint64_t op_root = derive_stream(seed, kOpSeedSalt);
  Burst out;
  AugmentStats stats;
  json specs = json::array();
  for (std::size_t i = 0; i < frames.frames.size(); ++i) {
    const RawFrame& frame = frames.frames[i];
    CounterRng rng(derive_stream(spec_root, i));
    AugmentSpec spec = sample_spec(config, frame.width, frame.height, rng);
    spec.seed = derive_stream(op_root, i);
    out.frames.push_back(
        augment_frame(frame, model, spec, op_mode, &stats, threads));
    specs.push_back(spec_to_json(spec));
  }
  save_output(input, out, out_dir);
  write_json_file(specs, (fs::path(out_dir) / "specs.json").string());
  write_json_file({{"clipped_variance_pixels", stats.clipped_variance_pixels},
                   {"saturated_pixels", stats.saturated_pixels},
                   {"total_pixels", stats.total_pixels}},
                  (fs::path(out_dir) / "stats.json").string());
}

void run_develop(const std::string& in_path, const std::string& curve_text,
                 const std::string& out_path, unsigned threads) {
  RawFrame frame = load_frame(strip_frame_suffix(in_path));
  ToneCurve curve = parse_tone_curve(curve_text);
  RgbImage8 image = develop(frame, curve, threads);
  write_ppm(image, out_path);
}

struct ValidateParams {
  SimParams sim;
  std::vector<PatchRegion> regions;  // fitting windows
};

ValidateParams parse_validate_params(const std::string& params_path,
                                     const NoiseModel& model,
                                     bool chart_interiors) {
  ValidateParams p;
  json j = params_path.empty() ? json::object() : load_json_file(params_path);
  p.sim = parse_sim_params(j);
  // The oracle mirrors the calibrated model unless overridden explicitly.
  SensorSpec defaults;
  defaults.alpha = model.alpha;
  defaults.sigma_d2 = model.sigma_d2;
  defaults.sigma_r2 = model.sigma_r2;
  p.sim.sensor = sensor_from_json(j, defaults);
  if (chart_interiors) {
    p.regions = chart_regions(p.sim.patch_size);
  } else {
    PatchRegion full;
    full.rows = 4 * p.sim.patch_size;
    full.cols = 6 * p.sim.patch_size;
    p.regions = {full};
  }
  return p;
}

void report_job(const AlignmentReport& report, const std::string& out_dir,
                const std::string& job, bool verbose) {
  fs::create_directories(out_dir);
  write_alignment_report(report, (fs::path(out_dir) / (job + ".json")).string(),
                         (fs::path(out_dir) / (job + "_pairs.csv")).string());
  if (verbose)
    std::fprintf(stderr,
                 "%s: slope_rel_err=%.4f intercept_rel_err=%.4f ks_p=%.4g\n",
                 job.c_str(), report.slope_rel_err, report.intercept_rel_err,
                 report.ks.p_value);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Sensor noise calibration, synthesis, and noise-accounted RAW "
      "augmentation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  unsigned threads_flag = 0;
  bool verbose = false;
  app.add_option("--seed", seed, "Root seed for all randomized work");
  app.add_option("--threads", threads_flag, "Worker threads (0 = auto)");
  app.add_flag("--verbose", verbose, "Log progress to stderr");

  // calibrate
  auto* cal = app.add_subcommand("calibrate",
                                 "Fit a noise model from burst captures");
  std::vector<std::string> cal_bursts;
  std::string cal_regions, cal_out, cal_report;
  cal->add_option("--bursts", cal_bursts, "Burst directories (repeatable)")
      ->required();
  cal->add_option("--regions", cal_regions, "Measurement regions JSON")
      ->required();
  cal->add_option("--out", cal_out, "Output noise model JSON")->required();
  cal->add_option("--report", cal_report, "Optional calibration report JSON");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Synthesize sensor data");
  std::string sim_kind, sim_params, sim_out;
  sim->add_option("kind", sim_kind, "What to synthesize")
      ->required()
      ->check(CLI::IsMember({"burst", "blur", "scene"}));
  sim->add_option("--params", sim_params, "Simulation parameters JSON")
      ->required();
  sim->add_option("--out", sim_out, "Output directory")->required();

  // augment
  auto* aug = app.add_subcommand("augment", "Transform a frame or burst");
  std::string aug_in, aug_model, aug_config, aug_mode, aug_out;
  aug->add_option("--in", aug_in, "Input frame base path or burst directory")
      ->required();
  aug->add_option("--model", aug_model, "Noise model JSON")->required();
  aug->add_option("--config", aug_config, "Augmentation config JSON");
  aug->add_option("--mode", aug_mode, "Augmentation flavor")
      ->required()
      ->check(CLI::IsMember({"ours", "naive", "wo_prior", "ksigma", "varmap"}));
  aug->add_option("--out", aug_out, "Output directory")->required();

  // develop
  auto* dev = app.add_subcommand("develop", "Render a frame to 8-bit RGB");
  std::string dev_in, dev_out;
  std::string dev_curve = "{\"variant\":\"simplest\",\"gamma\":5}";
  dev->add_option("--in", dev_in, "Input frame base path")->required();
  dev->add_option("--curve", dev_curve, "Tone curve JSON (inline or path)");
  dev->add_option("--out", dev_out, "Output image path (.ppm)")
      ->required()
      ->check([](const std::string& s) {
        if (s.size() > 4 && s.compare(s.size() - 4, 4, ".ppm") == 0)
          return std::string();
        return std::string("only binary PPM output is supported (use .ppm)");
      });

  // validate
  auto* val = app.add_subcommand("validate", "Statistical validation harness");
  val->require_subcommand(1);
  val->fallthrough();

  auto* val_align = val->add_subcommand(
      "alignment", "Converted vs real photon-transfer lines");
  std::string va_model, va_params, va_out;
  std::vector<double> va_contrast = {0.1, 0.5};
  std::vector<std::string> va_methods = {"ours", "wo_prior", "none"};
  int va_frames = 100;
  val_align->add_option("--model", va_model, "Noise model JSON")->required();
  val_align->add_option("--params", va_params, "Scene/sensor parameters JSON");
  val_align->add_option("--contrast", va_contrast, "Contrast factors")
      ->delimiter(',');
  val_align->add_option("--methods", va_methods, "Conversion methods")
      ->delimiter(',');
  val_align->add_option("--frames", va_frames, "Frames per burst");
  val_align->add_option("--out", va_out, "Report directory")->required();

  auto* val_blur = val->add_subcommand("blur", "Blurred vs real motion blur");
  std::string vb_model, vb_params, vb_out;
  std::vector<std::string> vb_modes = {"noise_accounted", "naive"};
  int vb_distance = 2;
  int vb_frames = 100;
  val_blur->add_option("--model", vb_model, "Noise model JSON")->required();
  val_blur->add_option("--params", vb_params, "Scene/sensor parameters JSON");
  val_blur->add_option("--modes", vb_modes, "Blur flavors")->delimiter(',');
  val_blur->add_option("--distance", vb_distance, "Blur distance (quads)");
  val_blur->add_option("--frames", vb_frames, "Frames per burst");
  val_blur->add_option("--out", vb_out, "Report directory")->required();

  auto* val_norm =
      val->add_subcommand("normality", "Per-pixel temporal normality");
  std::string vn_burst, vn_regions, vn_out;
  int vn_buckets = 10;
  val_norm->add_option("--burst", vn_burst, "Burst directory")->required();
  val_norm->add_option("--regions", vn_regions, "Measurement regions JSON");
  val_norm->add_option("--buckets", vn_buckets, "Equal-count buckets");
  val_norm->add_option("--out", vn_out, "Report directory")->required();

  // bench
  auto* ben = app.add_subcommand("bench", "Operator throughput");
  std::string ben_config, ben_out = "bench.json";
  ben->add_option("--config", ben_config,
                  "JSON with width/height/repetitions");
  ben->add_option("--out", ben_out, "Report path");

  try {
    app.parse(argc, argv);
    unsigned threads = resolve_threads(threads_flag);

    if (*cal) {
      run_calibrate(cal_bursts, cal_regions, cal_out, cal_report, seed,
                    threads);
    } else if (*sim) {
      run_simulate(sim_kind, sim_params, sim_out, seed, threads);
    } else if (*aug) {
      run_augment(aug_in, aug_model, aug_config, aug_mode, aug_out, seed,
                  threads);
    } else if (*dev) {
      run_develop(dev_in, dev_curve, dev_out, threads);
    } else if (*val_align && val_align->parsed()) {
      NoiseModel model = load_noise_model(va_model);
      ValidateParams p = parse_validate_params(va_params, model, false);
      SceneMap scene =
          color_checker_scene(p.sim.patch_size, p.sim.illumination);
      for (const std::string& method : va_methods) {
        ConversionMethod m = conversion_from_string(method);
        for (std::size_t ci = 0; ci < va_contrast.size(); ++ci) {
          AlignmentReport report = alignment_experiment(
              model, p.sim.sensor, scene, GainValue{p.sim.gain_db},
              va_contrast[ci], m, va_frames, p.regions,
              derive_stream(seed, ci), threads);
          char job[96];
          std::snprintf(job, sizeof(job), "alignment_%s_x%g", method.c_str(),
                        va_contrast[ci]);
          report_job(report, va_out, job, verbose);
        }
      }
    } else if (*val_blur && val_blur->parsed()) {
      NoiseModel model = load_noise_model(vb_model);
      ValidateParams p = parse_validate_params(vb_params, model, true);
      SceneMap scene =
          color_checker_scene(p.sim.patch_size, p.sim.illumination);
      BlurKernel kernel = BlurKernel::uniform_line(vb_distance, true);
      for (const std::string& mode : vb_modes) {
        BlurMode m;
        if (mode == "noise_accounted") {
          m = BlurMode::kNoiseAccounted;
        } else if (mode == "naive") {
          m = BlurMode::kNaive;
        } else {
          throw DataError("unknown blur mode: " + mode);
        }
        AlignmentReport report = blur_alignment_experiment(
            model, p.sim.sensor, scene, GainValue{p.sim.gain_db}, kernel, m,
            vb_frames, p.regions, derive_stream(seed, 0), threads);
        report_job(report, vb_out, "blur_" + mode, verbose);
      }
    } else if (*val_norm && val_norm->parsed()) {
      Burst burst = load_burst(vn_burst);
      std::vector<PatchRegion> regions;
      if (!vn_regions.empty()) {
        regions = load_regions(vn_regions);
      } else {
        PatchRegion full;
        full.rows = burst.frames.front().height;
        full.cols = burst.frames.front().width;
        regions = {full};
      }
      NormalityReport report =
          normality_report(burst, regions, vn_buckets, threads);
      fs::create_directories(vn_out);
      write_normality_report(
          report, (fs::path(vn_out) / "normality.json").string(),
          (fs::path(vn_out) / "normality_points.csv").string());
    } else if (*ben) {
      int width = 512, height = 512, repetitions = 5;
      if (!ben_config.empty()) {
        json j = load_json_file(ben_config);
        width = j.value("width", width);
        height = j.value("height", height);
        repetitions = j.value("repetitions", repetitions);
      }
      std::vector<BenchEntry> entries =
          bench(width, height, repetitions, threads, seed);
      write_bench_report(entries, ben_out);
      for (const BenchEntry& e : entries)
        std::printf("%-24s median %9.3f ms  p95 %9.3f ms  %8.2f MP/s\n",
                    e.op.c_str(), e.median_ms, e.p95_ms, e.megapixels_per_s);
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << json{{"error", std::string(e.what())}, {"kind", "usage"}}
                     .dump()
              << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << json{{"error", std::string(e.what())}, {"kind", "data"}}
                     .dump()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", std::string(e.what())}, {"kind", "internal"}}
                     .dump()
              << "\n";
    return 2;
  }
  return 0;
}
