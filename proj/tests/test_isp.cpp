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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rawaug/error.hpp"
#include "rawaug/isp.hpp"
#include "rawaug/raw_frame.hpp"

using namespace rawaug;

namespace {

RawFrame noisy_frame(int width, int height, CfaPattern cfa,
                     std::uint64_t seed) {
  RawFrame f = make_frame(width, height, cfa, 10, 64.0, 1023.0, 6.0);
  std::uint64_t state = seed;
  for (double& p : f.pixels) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    p = 64.0 + double(state >> 11) / 9007199254740992.0 * 959.0;
  }
  return f;
}

}  // namespace

TEST_CASE("tone curve validation and parsing") {
  ToneCurve bad;
  bad.gamma = 0.0;
  CHECK_THROWS_AS(validate_curve(bad), DataError);
  bad = ToneCurve{};
  bad.knee = -1.0;
  CHECK_THROWS_AS(validate_curve(bad), DataError);

  ToneCurve c = parse_tone_curve(R"({"variant":"simplest","gamma":5})");
  CHECK(c.kind == ToneCurveKind::kSimplest);
  CHECK(c.gamma == 5.0);

  ToneCurve p = parse_tone_curve(
      R"({"variant":"parameterized","gamma":2.2,"knee":3.0,"scale":0.9})");
  CHECK(p.kind == ToneCurveKind::kParameterized);
  CHECK(p.gamma == 2.2);
  CHECK(p.knee == 3.0);
  CHECK(p.scale == 0.9);

  CHECK_THROWS_AS(parse_tone_curve(R"({"variant":"sigmoid"})"), DataError);
  CHECK_THROWS_AS(parse_tone_curve("/nonexistent/curve.json"), DataError);

  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "rawaug_curve";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream out(dir / "curve.json");
  out << R"({"variant":"simplest","gamma":4})";
  out.close();
  ToneCurve from_file = parse_tone_curve((dir / "curve.json").string());
  CHECK(from_file.gamma == 4.0);
  fs::remove_all(dir);
}

TEST_CASE("gamma tone map hits the reference value at midgray") {
  ToneCurve curve;  // simplest, gamma 5
  CHECK(tone_map(0.5, curve) ==
        doctest::Approx(0.8705505632961241).epsilon(1e-15));
  CHECK(tone_map(0.0, curve) == 0.0);
  CHECK(tone_map(1.0, curve) == 1.0);
  CHECK_THROWS_AS(tone_map(-0.01, curve), DataError);
  CHECK_THROWS_AS(tone_map(1.01, curve), DataError);
}

TEST_CASE("zero-knee unit-scale parameterized curve equals the gamma curve") {
  ToneCurve simple;
  simple.gamma = 3.7;
  ToneCurve param;
  param.kind = ToneCurveKind::kParameterized;
  param.gamma = 3.7;
  param.knee = 0.0;
  param.scale = 1.0;
  for (int i = 0; i <= 1000; ++i) {
    double x = double(i) / 1000.0;
    CHECK(tone_map(x, param) == tone_map(x, simple));  // bit-exact
  }
}

TEST_CASE("tone curves are monotone and the knee boosts midtones") {
  ToneCurve param;
  param.kind = ToneCurveKind::kParameterized;
  param.gamma = 5.0;
  param.knee = 4.0;
  param.scale = 0.95;
  ToneCurve simple;
  double prev_p = -1.0, prev_s = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    double x = double(i) / 1000.0;
    double yp = tone_map(x, param);
    double ys = tone_map(x, simple);
    CHECK(yp >= prev_p);
    CHECK(ys >= prev_s);
    CHECK(yp <= 1.0);
    prev_p = yp;
    prev_s = ys;
  }
  // (1 + k) / (1 + k t) > 1 for t < 1: the knee lifts interior values.
  CHECK(tone_map(0.3, param) > 0.95 * tone_map(0.3, simple));

  ToneCurve hot = param;
  hot.scale = 2.0;  // would exceed 1: output clamps
  CHECK(tone_map(1.0, hot) == 1.0);
}

TEST_CASE("demosaic keeps constant fields constant in every channel") {
  RawFrame f = make_frame(8, 6, CfaPattern::kRggb, 10, 64.0, 1023.0, 0.0);
  for (double& p : f.pixels) p = 300.0;
  RgbImageF image = demosaic_bilinear(normalize(f));
  double want = (300.0 - 64.0) / 959.0;
  for (double v : image.pixels) CHECK(v == doctest::Approx(want).epsilon(1e-15));
}

TEST_CASE("demosaic resolves per-channel constants exactly") {
  RawFrame f = make_frame(8, 8, CfaPattern::kRggb, 10, 0.0, 1023.0, 0.0);
  f.normalized = true;
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      int color = cfa_color_at(f.cfa, r, c);
      f.at(r, c) = color == 0 ? 0.8 : (color == 1 ? 0.5 : 0.2);
    }
  }
  RgbImageF image = demosaic_bilinear(f);
  for (std::size_t i = 0; i < image.pixels.size(); i += 3) {
    CHECK(image.pixels[i + 0] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(image.pixels[i + 1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(image.pixels[i + 2] == doctest::Approx(0.2).epsilon(1e-15));
  }
}

TEST_CASE("demosaic averages the same-color neighbors bilinearly") {
  RawFrame f = noisy_frame(6, 6, CfaPattern::kRggb, 99);
  RawFrame n = normalize(f);
  RgbImageF image = demosaic_bilinear(n);
  auto px = [&](int r, int c, int ch) {
    return image.pixels[(std::size_t(r) * 6 + c) * 3 + ch];
  };
  // (2,3) is a green site in a red row: R from the row, B from the column.
  CHECK(px(2, 3, 1) == n.at(2, 3));
  CHECK(px(2, 3, 0) ==
        doctest::Approx((n.at(2, 2) + n.at(2, 4)) / 2.0).epsilon(1e-15));
  CHECK(px(2, 3, 2) ==
        doctest::Approx((n.at(1, 3) + n.at(3, 3)) / 2.0).epsilon(1e-15));
  // (2,2) is a red site: G from the 4-cross, B from the diagonals.
  CHECK(px(2, 2, 0) == n.at(2, 2));
  CHECK(px(2, 2, 1) ==
        doctest::Approx((n.at(1, 2) + n.at(3, 2) + n.at(2, 1) + n.at(2, 3)) / 4.0)
            .epsilon(1e-15));
  CHECK(px(2, 2, 2) ==
        doctest::Approx((n.at(1, 1) + n.at(1, 3) + n.at(3, 1) + n.at(3, 3)) / 4.0)
            .epsilon(1e-15));
  // Border pixel (0,0), red site: mirrored neighbors collapse.
  CHECK(px(0, 0, 0) == n.at(0, 0));
  CHECK(px(0, 0, 1) ==
        doctest::Approx((n.at(1, 0) + n.at(1, 0) + n.at(0, 1) + n.at(0, 1)) / 4.0)
            .epsilon(1e-15));
  CHECK(px(0, 0, 2) ==
        doctest::Approx((n.at(1, 1) * 4.0) / 4.0).epsilon(1e-15));

  CHECK_THROWS_AS(demosaic_bilinear(f), DataError);  // unnormalized
}

TEST_CASE("develop quantizes a constant midgray to 222") {
  // (543.5 - 64) / 959 = 0.5; 0.5^(1/5) * 255 = 221.99: rounds to 222.
  RawFrame f = make_frame(6, 4, CfaPattern::kRggb, 10, 64.0, 1023.0, 0.0);
  for (double& p : f.pixels) p = 543.5;
  RgbImage8 image = develop(f, ToneCurve{});
  REQUIRE(image.pixels.size() == 6 * 4 * 3);
  for (std::uint8_t v : image.pixels) CHECK(int(v) == 222);
}

TEST_CASE("develop commutes with horizontal mirror plus CFA relabel") {
  RawFrame f = noisy_frame(12, 8, CfaPattern::kRggb, 777);
  RawFrame mirrored = f;
  mirrored.cfa = CfaPattern::kGrbg;  // RGGB seen through a horizontal flip
  for (int r = 0; r < f.height; ++r)
    for (int c = 0; c < f.width; ++c)
      mirrored.at(r, c) = f.at(r, f.width - 1 - c);

  ToneCurve curve;
  RgbImage8 straight = develop(f, curve);
  RgbImage8 flipped = develop(mirrored, curve);
  for (int r = 0; r < f.height; ++r)
    for (int c = 0; c < f.width; ++c)
      for (int ch = 0; ch < 3; ++ch)
        CHECK(flipped.pixels[(std::size_t(r) * f.width + c) * 3 + ch] ==
              straight.pixels[(std::size_t(r) * f.width + (f.width - 1 - c)) *
                                  3 +
                              ch]);
}

TEST_CASE("develop is thread-count invariant") {
  RawFrame f = noisy_frame(16, 16, CfaPattern::kBggr, 555);
  ToneCurve curve;
  curve.kind = ToneCurveKind::kParameterized;
  curve.knee = 2.0;
  curve.scale = 0.9;
  RgbImage8 one = develop(f, curve, 1);
  RgbImage8 four = develop(f, curve, 4);
  CHECK(one.pixels == four.pixels);
}

TEST_CASE("ppm writer emits the exact P6 byte stream") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "rawaug_ppm";
  fs::remove_all(dir);
  fs::create_directories(dir);

  RgbImage8 image;
  image.width = 2;
  image.height = 2;
  image.pixels = {255, 0, 0, 0, 255, 0, 0, 0, 255, 10, 20, 30};
  std::string path = (dir / "out.ppm").string();
  write_ppm(image, path);

  std::ifstream in(path, std::ios::binary);
  std::string contents((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  std::string want = "P6\n2 2\n255\n";
  want += std::string("\xFF\x00\x00\x00\xFF\x00\x00\x00\xFF\x0A\x14\x1E", 12);
  CHECK(contents == want);

  RgbImage8 broken;
  broken.width = 2;
  broken.height = 2;
  broken.pixels = {1, 2, 3};  // wrong size
  CHECK_THROWS_AS(write_ppm(broken, (dir / "bad.ppm").string()), DataError);
  fs::remove_all(dir);
}
