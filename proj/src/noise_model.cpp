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

#include "rawaug/noise_model.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "rawaug/error.hpp"

namespace rawaug {

using nlohmann::json;

void validate_model(const NoiseModel& model) {
  if (!(model.alpha > 0.0)) throw DataError("model alpha must be positive");
  if (!(model.sigma_d2 >= 0.0) || !(model.sigma_r2 >= 0.0))
    throw DataError("model variance components must be non-negative");
}

double variance_at(const NoiseModel& model, GainValue gain, double mu) {
  validate_model(model);
  if (!(mu >= 0.0)) throw DataError("variance query needs mu >= 0");
  double g = gain.linear();
  return g * model.alpha * mu + g * g * model.sigma_d2 + model.sigma_r2;
}

double sample_gaussian(const NoiseModel& model, GainValue gain, double mu,
                       CounterRng& rng) {
  double var = variance_at(model, gain, mu);
  if (var == 0.0) return mu;
  return mu + std::sqrt(var) * rng.next_gaussian();
}

GainLine gain_line_of(const NoiseModel& model, GainValue gain) {
  validate_model(model);
  double g = gain.linear();
  GainLine line;
  line.gain_db = gain.db;
  line.slope = g * model.alpha;
  line.intercept = g * g * model.sigma_d2 + model.sigma_r2;
  line.r2 = 1.0;
  return line;
}

std::string model_to_json(const NoiseModel& model) {
  json j = {
      {"alpha", model.alpha},
      {"sigma_d2", model.sigma_d2},
      {"sigma_r2", model.sigma_r2},
  };
  if (model.has_provenance) {
    json lines = json::array();
    for (const GainLine& line : model.per_gain) {
      lines.push_back({{"gain_db", line.gain_db},
                       {"slope", line.slope},
                       {"intercept", line.intercept},
                       {"r2", line.r2},
                       {"inlier_fraction", line.inlier_fraction},
                       {"n_pairs", line.n_pairs}});
    }
    j["provenance"] = {{"per_gain", lines},
                       {"alpha_r2", model.alpha_r2},
                       {"read_noise_r2", model.read_noise_r2},
                       {"clamped", model.clamped}};
  }
  return j.dump(2);
}

NoiseModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model JSON: ") + e.what());
  }
  NoiseModel model;
  try {
    model.alpha = j.at("alpha").get<double>();
    model.sigma_d2 = j.at("sigma_d2").get<double>();
    model.sigma_r2 = j.at("sigma_r2").get<double>();
    if (j.contains("provenance")) {
      const json& p = j.at("provenance");
      model.has_provenance = true;
      model.alpha_r2 = p.value("alpha_r2", 0.0);
      model.read_noise_r2 = p.value("read_noise_r2", 0.0);
      model.clamped = p.value("clamped", false);
      for (const json& l : p.value("per_gain", json::array())) {
        GainLine line;
        line.gain_db = l.at("gain_db").get<double>();
        line.slope = l.at("slope").get<double>();
        line.intercept = l.at("intercept").get<double>();
        line.r2 = l.value("r2", 0.0);
        line.inlier_fraction = l.value("inlier_fraction", 1.0);
        line.n_pairs = l.value("n_pairs", std::size_t(0));
        model.per_gain.push_back(line);
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("model JSON field error: ") + e.what());
  }
  validate_model(model);
  return model;
}

void save_noise_model(const NoiseModel& model, const std::string& path) {
  validate_model(model);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << model_to_json(model) << "\n";
  if (!out) throw DataError("short write: " + path);
}

NoiseModel load_noise_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace rawaug
