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

#include "rawaug/frame_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "rawaug/error.hpp"

namespace rawaug {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string strip_raw16(const std::string& path) {
  const std::string ext = ".raw16";
  if (path.size() > ext.size() &&
      path.compare(path.size() - ext.size(), ext.size(), ext) == 0) {
    return path.substr(0, path.size() - ext.size());
  }
  return path;
}

std::string frame_base(const std::string& dir, std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof(name), "frame_%04zu", index);
  return (fs::path(dir) / name).string();
}

}  // namespace

void save_frame(const RawFrame& frame, const std::string& path) {
  validate_frame(frame);
  std::string base = strip_raw16(path);
  double dn_max = double((1u << frame.bit_depth) - 1u);

  std::vector<std::uint16_t> payload(frame.pixel_count());
  for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
    double rounded = round_half_even(frame.pixels[i]);
    if (!(rounded >= 0.0) || rounded > dn_max)
      throw DataError("pixel value out of storable range after rounding");
    payload[i] = std::uint16_t(rounded);
  }

  std::ofstream raw(base + ".raw16", std::ios::binary | std::ios::trunc);
  if (!raw) throw DataError("cannot open for writing: " + base + ".raw16");
  for (std::uint16_t v : payload) {
    char bytes[2] = {char(v & 0xFF), char(v >> 8)};
    raw.write(bytes, 2);
  }
  if (!raw) throw DataError("short write: " + base + ".raw16");
  raw.close();

  json meta = {
      {"width", frame.width},
      {"height", frame.height},
      {"cfa", cfa_to_string(frame.cfa)},
      {"bit_depth", frame.bit_depth},
      {"black_level", frame.black_level},
      {"white_level", frame.white_level},
      {"gain_db", frame.gain_db},
      {"normalized", frame.normalized},
  };
  std::ofstream side(base + ".json", std::ios::trunc);
  if (!side) throw DataError("cannot open for writing: " + base + ".json");
  side << meta.dump(2) << "\n";
  if (!side) throw DataError("short write: " + base + ".json");
}

RawFrame load_frame(const std::string& path) {
  std::string base = strip_raw16(path);

  std::ifstream side(base + ".json");
  if (!side) throw DataError("missing sidecar: " + base + ".json");
  json meta;
  try {
    side >> meta;
  } catch (const json::exception& e) {
    throw DataError("malformed sidecar " + base + ".json: " + e.what());
  }

  RawFrame frame;
  try {
    frame.width = meta.at("width").get<int>();
    frame.height = meta.at("height").get<int>();
    frame.cfa = cfa_from_string(meta.at("cfa").get<std::string>());
    frame.bit_depth = meta.at("bit_depth").get<int>();
    frame.black_level = meta.at("black_level").get<double>();
    frame.white_level = meta.at("white_level").get<double>();
    frame.gain_db = meta.at("gain_db").get<double>();
    frame.normalized = meta.at("normalized").get<bool>();
  } catch (const json::exception& e) {
    throw DataError("sidecar field error in " + base + ".json: " + e.what());
  }

  std::ifstream raw(base + ".raw16", std::ios::binary);
  if (!raw) throw DataError("missing payload: " + base + ".raw16");
  std::vector<char> bytes((std::istreambuf_iterator<char>(raw)),
                          std::istreambuf_iterator<char>());
  if (frame.width <= 0 || frame.height <= 0)
    throw DataError("frame dimensions must be positive");
  std::size_t expect = std::size_t(frame.width) * std::size_t(frame.height) * 2;
  if (bytes.size() != expect)
    throw DataError("payload size mismatch: " + base + ".raw16");

  double dn_max = double((1u << frame.bit_depth) - 1u);
  frame.pixels.resize(bytes.size() / 2);
  for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
    std::uint16_t v = std::uint16_t(std::uint8_t(bytes[2 * i])) |
                      (std::uint16_t(std::uint8_t(bytes[2 * i + 1])) << 8);
    if (double(v) > dn_max)
      throw DataError("stored value exceeds bit-depth range: " + base);
    frame.pixels[i] = double(v);
  }
  validate_frame(frame);
  return frame;
}

void save_burst(const Burst& burst, const std::string& dir) {
  validate_burst(burst);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory: " + dir);
  for (std::size_t i = 0; i < burst.frames.size(); ++i)
    save_frame(burst.frames[i], frame_base(dir, i));
}

Burst load_burst(const std::string& dir) {
  if (!fs::is_directory(dir)) throw DataError("not a burst directory: " + dir);
  Burst burst;
  for (std::size_t i = 0;; ++i) {
    std::string base = frame_base(dir, i);
    if (!fs::exists(base + ".raw16")) break;
    burst.frames.push_back(load_frame(base));
  }
  validate_burst(burst);
  return burst;
}

}  // namespace rawaug
