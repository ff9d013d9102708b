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

#include "rawaug/augment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "rawaug/error.hpp"
#include "rawaug/parallel.hpp"
#include "rawaug/rng.hpp"

namespace rawaug {
namespace {

using nlohmann::json;

constexpr std::uint64_t kJitterSalt = 0x434A4954ull;  // "CJIT"
constexpr std::uint64_t kBlurSalt = 0x424C5552ull;    // "BLUR"

// Correction variance for scaling a noisy value by p_u*p_g: the target
// condition's variance minus the (scaled) variance already present.
double correction_variance(double mu, double p_u, double p_g, double photon,
                           double pre_floor, double read_floor) {
  double pg2 = p_g * p_g;
  double pu2 = p_u * p_u;
  return p_u * (1.0 - p_u) * pg2 * photon * mu +
         (1.0 - pu2) * pg2 * pre_floor + (1.0 - pu2 * pg2) * read_floor;
}

struct FrameGuard {
  double black;
  double white;
  double photon;      // g * alpha
  double pre_floor;   // g^2 * sigma_d^2
  double read_floor;  // sigma_r^2
};

FrameGuard guard_for(const RawFrame& frame, const NoiseModel& model) {
  validate_frame(frame);
  if (frame.normalized)
    throw DataError("augmentation operates on unnormalized frames");
  validate_model(model);
  double g = GainValue{frame.gain_db}.linear();
  return {frame.black_level, frame.white_level, g * model.alpha,
          g * g * model.sigma_d2, model.sigma_r2};
}

void bump(std::atomic<std::size_t>& counter, std::size_t amount) {
  if (amount) counter.fetch_add(amount, std::memory_order_relaxed);
}

struct StatsAccumulator {
  std::atomic<std::size_t> clipped{0};
  std::atomic<std::size_t> saturated{0};

  void publish(AugmentStats* stats, std::size_t total) const {
    if (!stats) return;
    stats->clipped_variance_pixels += clipped.load();
    stats->saturated_pixels += saturated.load();
    stats->total_pixels += total;
  }
};

double frame_min_signal(const RawFrame& frame) {
  double lo = frame.pixels.front();
  for (double v : frame.pixels) lo = std::min(lo, v);
  return lo - frame.black_level;
}

double uniform_in(CounterRng& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.next_unit();
}

std::uint64_t uniform_int(CounterRng& rng, std::uint64_t n) {
  // n is tiny here; modulo bias is far below any observable rate.
  return rng.next_u64() % n;
}

}  // namespace

void validate_augment_config(const AugmentConfig& c) {
  if (!(c.contrast_min > 0.0) || c.contrast_min > c.contrast_max)
    throw DataError("contrast range must be positive and ordered");
  if (c.hue_prob < 0.0 || c.hue_prob > 1.0 || c.blur_prob < 0.0 ||
      c.blur_prob > 1.0 || c.geometric_prob < 0.0 || c.geometric_prob > 1.0)
    throw DataError("probabilities must lie in [0, 1]");
  if (!(c.hue_min > 0.0) || c.hue_min > c.hue_max)
    throw DataError("hue range must be positive and ordered");
  if (c.brightness_min > c.brightness_max)
    throw DataError("brightness range must be ordered");
  if (!(c.p_g_min > 0.0) || c.p_g_min > c.p_g_max)
    throw DataError("gain-attribution range must be positive and ordered");
  if (c.blur_max_distance < 0)
    throw DataError("blur distance must be non-negative");
  if (c.shift_max_fraction < 0.0 || c.shift_max_fraction > 0.5)
    throw DataError("shift fraction must lie in [0, 0.5]");
  if (!(c.scale_min > 0.0) || c.scale_min > c.scale_max)
    throw DataError("scale range must be positive and ordered");
}

AugmentConfig load_augment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing augmentation config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("malformed augmentation config: " + std::string(e.what()));
  }
  AugmentConfig c;
  try {
    c.contrast_min = j.value("contrast_min", c.contrast_min);
    c.contrast_max = j.value("contrast_max", c.contrast_max);
    c.hue_prob = j.value("hue_prob", c.hue_prob);
    c.hue_min = j.value("hue_min", c.hue_min);
    c.hue_max = j.value("hue_max", c.hue_max);
    c.brightness_min = j.value("brightness_min", c.brightness_min);
    c.brightness_max = j.value("brightness_max", c.brightness_max);
    c.p_g_min = j.value("p_g_min", c.p_g_min);
    c.p_g_max = j.value("p_g_max", c.p_g_max);
    c.blur_prob = j.value("blur_prob", c.blur_prob);
    c.blur_max_distance = j.value("blur_max_distance", c.blur_max_distance);
    c.geometric_prob = j.value("geometric_prob", c.geometric_prob);
    c.shift_max_fraction = j.value("shift_max_fraction", c.shift_max_fraction);
    c.scale_min = j.value("scale_min", c.scale_min);
    c.scale_max = j.value("scale_max", c.scale_max);
  } catch (const json::exception& e) {
    throw DataError("bad augmentation config field: " + std::string(e.what()));
  }
  validate_augment_config(c);
  return c;
}

bool AugmentSpec::identity() const {
  return p_c[0] == 1.0 && p_c[1] == 1.0 && p_c[2] == 1.0 && p_b_hat == 0.0 &&
         p_g == 1.0 && (!blur_applied || blur.is_identity()) &&
         (!geometric_applied ||
          (shift_x == 0 && shift_y == 0 && scale == 1.0));
}

AugmentSpec sample_spec(const AugmentConfig& config, int width, int height,
                        CounterRng& rng) {
  validate_augment_config(config);
  if (width <= 0 || height <= 0 || width % 2 != 0 || height % 2 != 0)
    throw DataError("frame dimensions must be positive and even");

  AugmentSpec spec;
  spec.p_c_base = uniform_in(rng, config.contrast_min, config.contrast_max);
  spec.hue_applied = rng.next_unit() < config.hue_prob;
  for (int ch = 0; ch < 3; ++ch)
    spec.p_c[ch] = spec.hue_applied
                       ? spec.p_c_base *
                             uniform_in(rng, config.hue_min, config.hue_max)
                       : spec.p_c_base;
  spec.p_b_hat =
      uniform_in(rng, config.brightness_min, config.brightness_max);
  if (config.p_g_min == config.p_g_max) {
    spec.p_g = config.p_g_min;
  } else {
    spec.p_g = std::exp(uniform_in(rng, std::log(config.p_g_min),
                                   std::log(config.p_g_max)));
  }
  spec.blur_applied = rng.next_unit() < config.blur_prob;
  if (spec.blur_applied) {
    bool horizontal = rng.next_unit() < 0.5;
    int distance =
        int(uniform_int(rng, std::uint64_t(config.blur_max_distance) + 1));
    spec.blur = BlurKernel::uniform_line(distance, horizontal);
  }
  spec.geometric_applied = rng.next_unit() < config.geometric_prob;
  if (spec.geometric_applied) {
    int max_qx = int(config.shift_max_fraction * width) / 2;
    int max_qy = int(config.shift_max_fraction * height) / 2;
    spec.shift_x = 2 * (int(uniform_int(rng, 2 * std::uint64_t(max_qx) + 1)) -
                        max_qx);
    spec.shift_y = 2 * (int(uniform_int(rng, 2 * std::uint64_t(max_qy) + 1)) -
                        max_qy);
    spec.scale = uniform_in(rng, config.scale_min, config.scale_max);
  }
  return spec;
}

RawFrame exposure_gain_shift(const RawFrame& frame, const NoiseModel& model,
                             double p_u, double p_g, std::uint64_t stream_key,
                             AugmentStats* stats, unsigned threads) {
  FrameGuard gd = guard_for(frame, model);
  if (!(p_u > 0.0) || !(p_g > 0.0))
    throw DataError("scaling factors must be positive");
  if (p_u == 1.0 && p_g == 1.0) {
    if (stats) stats->total_pixels += frame.pixel_count();
    return frame;
  }
  RawFrame out = frame;
  // The reattributed share becomes real analog gain of the target condition.
  if (p_g != 1.0)
    out.gain_db =
        GainValue::from_linear(p_g * GainValue{frame.gain_db}.linear()).db;
  double f = p_u * p_g;
  StatsAccumulator acc;
  parallel_for(frame.pixel_count(), threads,
               [&](std::size_t begin, std::size_t end) {
                 std::size_t clipped = 0, saturated = 0;
                 for (std::size_t i = begin; i < end; ++i) {
                   CounterRng rng(stream_key, i);
                   double x = frame.pixels[i] - gd.black;
                   double t = f * x;
                   // The raw (possibly negative) value keeps the variance
                   // estimate unbiased around dark means; rectifying first
                   // would lift it by sigma*phi(mu/sigma) per pixel.
                   double v = correction_variance(x, p_u, p_g, gd.photon,
                                                  gd.pre_floor, gd.read_floor);
                   if (v < 0.0) {
                     v = 0.0;
                     ++clipped;
                   }
                   double y = t + gd.black + std::sqrt(v) * rng.next_gaussian();
                   if (y > gd.white) {
                     y = gd.white;
                     ++saturated;
                   } else if (y < 0.0) {
                     y = 0.0;
                   }
                   out.pixels[i] = y;
                 }
                 bump(acc.clipped, clipped);
                 bump(acc.saturated, saturated);
               });
  acc.publish(stats, frame.pixel_count());
  return out;
}

RawFrame color_jitter(const RawFrame& frame, const NoiseModel& model,
                      const AugmentSpec& spec, std::uint64_t stream_key,
                      AugmentStats* stats, unsigned threads) {
  FrameGuard gd = guard_for(frame, model);
  if (!(spec.p_g > 0.0)) throw DataError("gain attribution must be positive");
  for (double p : spec.p_c)
    if (!(p > 0.0)) throw DataError("channel contrast must be positive");

  double p_b = spec.p_b_hat == 0.0 ? 0.0 : spec.p_b_hat * frame_min_signal(frame);
  RawFrame out = frame;
  if (spec.p_g != 1.0)
    out.gain_db =
        GainValue::from_linear(spec.p_g * GainValue{frame.gain_db}.linear()).db;
  StatsAccumulator acc;
  parallel_for(
      std::size_t(frame.height), threads, [&](std::size_t r0, std::size_t r1) {
        std::size_t clipped = 0, saturated = 0;
        for (std::size_t r = r0; r < r1; ++r) {
          for (int c = 0; c < frame.width; ++c) {
            std::size_t i = r * std::size_t(frame.width) + c;
            double pc = spec.p_c[cfa_color_at(frame.cfa, int(r), c)];
            if (pc == 1.0 && p_b == 0.0 && spec.p_g == 1.0) continue;
            double x = frame.pixels[i] - gd.black;
            double t = pc * x + p_b;
            double y;
            if (x > 0.0 && t > 0.0) {
              CounterRng rng(stream_key, i);
              double p_u = (t / x) / spec.p_g;
              double v = correction_variance(x, p_u, spec.p_g, gd.photon,
                                             gd.pre_floor, gd.read_floor);
              if (v < 0.0) {
                v = 0.0;
                ++clipped;
              }
              y = t + gd.black + std::sqrt(v) * rng.next_gaussian();
            } else {
              // Zero/negative input or target: deterministic clamped map.
              y = std::max(t, 0.0) + gd.black;
            }
            if (y > gd.white) {
              y = gd.white;
              ++saturated;
            } else if (y < 0.0) {
              y = 0.0;
            }
            out.pixels[i] = y;
          }
        }
        bump(acc.clipped, clipped);
        bump(acc.saturated, saturated);
      });
  acc.publish(stats, frame.pixel_count());
  return out;
}

RawFrame naive_color_jitter(const RawFrame& frame, const AugmentSpec& spec,
                            unsigned threads) {
  validate_frame(frame);
  if (frame.normalized)
    throw DataError("augmentation operates on unnormalized frames");
  for (double p : spec.p_c)
    if (!(p > 0.0)) throw DataError("channel contrast must be positive");
  double black = frame.black_level, white = frame.white_level;
  double p_b = spec.p_b_hat == 0.0 ? 0.0 : spec.p_b_hat * frame_min_signal(frame);
  RawFrame out = frame;
  parallel_for(
      std::size_t(frame.height), threads, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t r = r0; r < r1; ++r) {
          for (int c = 0; c < frame.width; ++c) {
            std::size_t i = r * std::size_t(frame.width) + c;
            double pc = spec.p_c[cfa_color_at(frame.cfa, int(r), c)];
            if (pc == 1.0 && p_b == 0.0) continue;
            double t = pc * (frame.pixels[i] - black) + p_b + black;
            out.pixels[i] = std::clamp(t, 0.0, white);
          }
        }
      });
  return out;
}

RawFrame wo_prior_color_jitter(const RawFrame& frame, const NoiseModel& model,
                               const AugmentSpec& spec,
                               std::uint64_t stream_key, AugmentStats* stats,
                               unsigned threads) {
  FrameGuard gd = guard_for(frame, model);
  if (!(spec.p_g > 0.0)) throw DataError("gain attribution must be positive");
  for (double p : spec.p_c)
    if (!(p > 0.0)) throw DataError("channel contrast must be positive");
  double p_b = spec.p_b_hat == 0.0 ? 0.0 : spec.p_b_hat * frame_min_signal(frame);
  double g_target = spec.p_g * GainValue{frame.gain_db}.linear();
  double slope_t = g_target * model.alpha;
  double floor_t = g_target * g_target * model.sigma_d2 + model.sigma_r2;
  RawFrame out = frame;
  if (spec.p_g != 1.0) out.gain_db = GainValue::from_linear(g_target).db;
  StatsAccumulator acc;
  parallel_for(
      std::size_t(frame.height), threads, [&](std::size_t r0, std::size_t r1) {
        std::size_t clipped = 0, saturated = 0;
        for (std::size_t r = r0; r < r1; ++r) {
          for (int c = 0; c < frame.width; ++c) {
            std::size_t i = r * std::size_t(frame.width) + c;
            double pc = spec.p_c[cfa_color_at(frame.cfa, int(r), c)];
            double x = frame.pixels[i] - gd.black;
            double t = pc * x + p_b;
            // Full target-condition noise; the input's own (scaled) noise is
            // deliberately not discounted.  The mean stays unrectified so the
            // estimate is unbiased around dark pixels; only the variance is
            // floored at zero.
            double v = slope_t * t + floor_t;
            if (v < 0.0) {
              v = 0.0;
              ++clipped;
            }
            CounterRng rng(stream_key, i);
            double y = t + gd.black + std::sqrt(v) * rng.next_gaussian();
            if (y > gd.white) {
              y = gd.white;
              ++saturated;
            } else if (y < 0.0) {
              y = 0.0;
            }
            out.pixels[i] = y;
          }
        }
        bump(acc.clipped, clipped);
        bump(acc.saturated, saturated);
      });
  acc.publish(stats, frame.pixel_count());
  return out;
}

RawFrame noise_accounted_blur(const RawFrame& frame, const NoiseModel& model,
                              const BlurKernel& kernel,
                              std::uint64_t stream_key, AugmentStats* stats,
                              unsigned threads) {
  FrameGuard gd = guard_for(frame, model);
  validate_kernel(kernel);
  if (kernel.is_identity()) {
    if (stats) stats->total_pixels += frame.pixel_count();
    return frame;
  }
  double floor_scale = 1.0 - kernel.weight_square_sum();
  double floor_var = floor_scale * (gd.pre_floor + gd.read_floor);
  RawFrame out = frame;
  StatsAccumulator acc;
  parallel_for(
      std::size_t(frame.height), threads, [&](std::size_t r0, std::size_t r1) {
        std::size_t clipped = 0, saturated = 0;
        for (std::size_t r = r0; r < r1; ++r) {
          for (int c = 0; c < frame.width; ++c) {
            std::size_t i = r * std::size_t(frame.width) + c;
            double mean = 0.0, shot = 0.0;
            for (const BlurTap& tap : kernel.taps) {
              int rr = reflect_index(int(r) + 2 * tap.drow, frame.height);
              int cc = reflect_index(c + 2 * tap.dcol, frame.width);
              double xk = frame.at(rr, cc) - gd.black;
              mean += tap.weight * xk;
              // Raw taps, sign included: per-tap rectification would bias the
              // shot estimate upward wherever the signal nears the floor.
              shot += (1.0 - tap.weight) * tap.weight * xk;
            }
            double v = gd.photon * shot + floor_var;
            if (v < 0.0) {
              v = 0.0;
              ++clipped;
            }
            CounterRng rng(stream_key, i);
            double y = mean + gd.black + std::sqrt(v) * rng.next_gaussian();
            if (y > gd.white) {
              y = gd.white;
              ++saturated;
            } else if (y < 0.0) {
              y = 0.0;
            }
            out.pixels[i] = y;
          }
        }
        bump(acc.clipped, clipped);
        bump(acc.saturated, saturated);
      });
  acc.publish(stats, frame.pixel_count());
  return out;
}

RawFrame naive_blur(const RawFrame& frame, const BlurKernel& kernel,
                    unsigned threads) {
  validate_frame(frame);
  if (frame.normalized)
    throw DataError("augmentation operates on unnormalized frames");
  validate_kernel(kernel);
  if (kernel.is_identity()) return frame;
  double black = frame.black_level, white = frame.white_level;
  RawFrame out = frame;
  parallel_for(
      std::size_t(frame.height), threads, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t r = r0; r < r1; ++r) {
          for (int c = 0; c < frame.width; ++c) {
            double mean = 0.0;
            for (const BlurTap& tap : kernel.taps) {
              int rr = reflect_index(int(r) + 2 * tap.drow, frame.height);
              int cc = reflect_index(c + 2 * tap.dcol, frame.width);
              mean += tap.weight * (frame.at(rr, cc) - black);
            }
            out.pixels[r * std::size_t(frame.width) + c] =
                std::clamp(mean + black, 0.0, white);
          }
        }
      });
  return out;
}

RawFrame geometric(const RawFrame& frame, const AugmentSpec& spec) {
  validate_frame(frame);
  if (!spec.geometric_applied) return frame;
  if (!(spec.scale > 0.0)) throw DataError("scale must be positive");
  // Odd shifts would swap mosaic phase; round to the nearest whole quad.
  int sx = 2 * int(std::lround(spec.shift_x / 2.0));
  int sy = 2 * int(std::lround(spec.shift_y / 2.0));
  if (sx == 0 && sy == 0 && spec.scale == 1.0) return frame;

  int qw = frame.width / 2, qh = frame.height / 2;
  double cx = (qw - 1) / 2.0, cy = (qh - 1) / 2.0;
  RawFrame out = frame;
  for (int qr = 0; qr < qh; ++qr) {
    for (int qc = 0; qc < qw; ++qc) {
      int src_qr =
          int(std::lround((qr - cy) / spec.scale + cy)) - sy / 2;
      int src_qc =
          int(std::lround((qc - cx) / spec.scale + cx)) - sx / 2;
      src_qr = std::clamp(src_qr, 0, qh - 1);
      src_qc = std::clamp(src_qc, 0, qw - 1);
      for (int dr = 0; dr < 2; ++dr)
        for (int dc = 0; dc < 2; ++dc)
          out.pixels[std::size_t(2 * qr + dr) * frame.width + 2 * qc + dc] =
              frame.at(2 * src_qr + dr, 2 * src_qc + dc);
    }
  }
  return out;
}

RawFrame ksigma_forward(const RawFrame& frame, const NoiseModel& model) {
  validate_frame(frame);
  if (frame.normalized)
    throw DataError("transform operates on unnormalized frames");
  validate_model(model);
  double g = GainValue{frame.gain_db}.linear();
  double k = g * model.alpha;
  double b = g * g * model.sigma_d2 + model.sigma_r2;
  RawFrame out = frame;
  for (double& p : out.pixels) p = (p - frame.black_level) / k + b / (k * k);
  return out;
}

RawFrame ksigma_inverse(const RawFrame& frame, const NoiseModel& model) {
  validate_frame(frame);
  if (frame.normalized)
    throw DataError("transform operates on unnormalized frames");
  validate_model(model);
  double g = GainValue{frame.gain_db}.linear();
  double k = g * model.alpha;
  double b = g * g * model.sigma_d2 + model.sigma_r2;
  RawFrame out = frame;
  for (double& p : out.pixels) p = (p - b / (k * k)) * k + frame.black_level;
  return out;
}

std::vector<double> variance_map(const RawFrame& frame,
                                 const NoiseModel& model) {
  validate_frame(frame);
  if (frame.normalized)
    throw DataError("variance map operates on unnormalized frames");
  validate_model(model);
  GainValue gain{frame.gain_db};
  std::vector<double> map(frame.pixel_count());
  for (std::size_t i = 0; i < map.size(); ++i)
    map[i] = variance_at(model, gain,
                         std::max(frame.pixels[i] - frame.black_level, 0.0));
  return map;
}

AugmentMode augment_mode_from_string(const std::string& name) {
  if (name == "ours") return AugmentMode::kOurs;
  if (name == "naive") return AugmentMode::kNaive;
  if (name == "wo_prior") return AugmentMode::kWoPrior;
  throw DataError("unknown augmentation mode: " + name);
}

RawFrame augment_frame(const RawFrame& frame, const NoiseModel& model,
                       const AugmentSpec& spec, AugmentMode mode,
                       AugmentStats* stats, unsigned threads) {
  RawFrame staged = geometric(frame, spec);
  std::uint64_t jitter_key = derive_stream(spec.seed, kJitterSalt);
  std::uint64_t blur_key = derive_stream(spec.seed, kBlurSalt);
  RawFrame jittered;
  switch (mode) {
    case AugmentMode::kOurs:
      jittered = color_jitter(staged, model, spec, jitter_key, stats, threads);
      break;
    case AugmentMode::kNaive:
      jittered = naive_color_jitter(staged, spec, threads);
      break;
    case AugmentMode::kWoPrior:
      jittered =
          wo_prior_color_jitter(staged, model, spec, jitter_key, stats, threads);
      break;
    default:
      throw DataError("unsupported augmentation mode");
  }
  if (!spec.blur_applied || spec.blur.is_identity()) return jittered;
  if (mode == AugmentMode::kOurs)
    return noise_accounted_blur(jittered, model, spec.blur, blur_key, stats,
                                threads);
  return naive_blur(jittered, spec.blur, threads);
}

}  // namespace rawaug
