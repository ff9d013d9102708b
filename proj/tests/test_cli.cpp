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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(bool(in), "missing file: " << path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const std::string& cli_path() {
  static std::string path = [] {
    const char* env = std::getenv("RAWAUG_CLI");
    REQUIRE_MESSAGE(env != nullptr, "RAWAUG_CLI must point at the binary");
    return std::string(env);
  }();
  return path;
}

fs::path workspace() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "rawaug_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run(const std::string& args) {
  static int counter = 0;
  fs::path out = workspace() / ("stdout_" + std::to_string(counter) + ".txt");
  fs::path err = workspace() / ("stderr_" + std::to_string(counter) + ".txt");
  ++counter;
  std::string cmd = cli_path() + " " + args + " > " + out.string() + " 2> " +
                    err.string();
  int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = read_file(out);
  result.err = read_file(err);
  return result;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  REQUIRE(bool(out));
  out << text;
}

}  // namespace

TEST_CASE("help exits cleanly and lists the subcommands") {
  RunResult r = run("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("calibrate") != std::string::npos);
  CHECK(r.out.find("augment") != std::string::npos);
  CHECK(r.out.find("develop") != std::string::npos);
}

TEST_CASE("usage errors exit 1 with a machine-readable reason") {
  RunResult none = run("");
  CHECK(none.exit_code == 1);
  CHECK(none.err.find("\"kind\":\"usage\"") != std::string::npos);

  RunResult unknown = run("frobnicate");
  CHECK(unknown.exit_code == 1);
  CHECK(unknown.err.find("\"kind\":\"usage\"") != std::string::npos);

  RunResult bad_ext = run("develop --in x --out image.png");
  CHECK(bad_ext.exit_code == 1);
  CHECK(bad_ext.err.find("\"kind\":\"usage\"") != std::string::npos);
}

TEST_CASE("data errors exit 2 with a machine-readable reason") {
  fs::path w = workspace();
  RunResult r = run("augment --in " + (w / "nope").string() + " --model " +
                    (w / "nope.json").string() + " --mode ours --out " +
                    (w / "never").string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("\"kind\":\"data\"") != std::string::npos);
}

TEST_CASE("end-to-end pipeline is reproducible byte for byte") {
  fs::path w = workspace();

  // Illumination keeps the brightest patch near 80% of range at each gain.
  write_text(w / "params6.json",
             R"({"patch_size":16,"illumination":0.16,"gain_db":6,"n_frames":20})");
  write_text(w / "params24.json",
             R"({"patch_size":16,"illumination":0.02,"gain_db":24,"n_frames":20})");

  RunResult sim6 =
      run("--seed 5 simulate burst --params " + (w / "params6.json").string() +
          " --out " + (w / "b6").string());
  INFO(sim6.err);
  REQUIRE(sim6.exit_code == 0);
  RunResult sim24 =
      run("--seed 6 simulate burst --params " + (w / "params24.json").string() +
          " --out " + (w / "b24").string());
  INFO(sim24.err);
  REQUIRE(sim24.exit_code == 0);
  CHECK(fs::exists(w / "b6" / "frame_0019.raw16"));
  CHECK(fs::exists(w / "b6" / "regions.json"));

  SUBCASE("same seed reproduces captures; threads do not matter") {
    RunResult again = run("--seed 5 --threads 4 simulate burst --params " +
                          (w / "params6.json").string() + " --out " +
                          (w / "b6_again").string());
    REQUIRE(again.exit_code == 0);
    for (int i : {0, 7, 19}) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%04d.raw16", i);
      CHECK(read_file(w / "b6" / name) == read_file(w / "b6_again" / name));
    }
    RunResult other = run("--seed 99 simulate burst --params " +
                          (w / "params6.json").string() + " --out " +
                          (w / "b6_other").string());
    REQUIRE(other.exit_code == 0);
    CHECK(read_file(w / "b6" / "frame_0000.raw16") !=
          read_file(w / "b6_other" / "frame_0000.raw16"));
  }

  RunResult cal = run("--seed 7 calibrate --bursts " + (w / "b6").string() +
                      " " + (w / "b24").string() + " --regions " +
                      (w / "b6" / "regions.json").string() + " --out " +
                      (w / "model.json").string() + " --report " +
                      (w / "report.json").string());
  INFO(cal.err);
  REQUIRE(cal.exit_code == 0);
  json model = json::parse(read_file(w / "model.json"));
  CHECK(model.at("alpha").get<double>() > 0.0);
  json report = json::parse(read_file(w / "report.json"));
  CHECK(report.at("lines").size() == 2);

  SUBCASE("augmentation is deterministic across thread counts") {
    std::string common = "augment --in " + (w / "b6").string() + " --model " +
                         (w / "model.json").string() + " --mode ours --seed 9";
    RunResult a1 = run("--threads 1 " + common + " --out " + (w / "aug1").string());
    INFO(a1.err);
    REQUIRE(a1.exit_code == 0);
    RunResult a4 = run("--threads 4 " + common + " --out " + (w / "aug4").string());
    REQUIRE(a4.exit_code == 0);
    for (int i = 0; i < 20; ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%04d.raw16", i);
      CHECK(read_file(w / "aug1" / name) == read_file(w / "aug4" / name));
    }
    CHECK(read_file(w / "aug1" / "specs.json") ==
          read_file(w / "aug4" / "specs.json"));
    json specs = json::parse(read_file(w / "aug1" / "specs.json"));
    CHECK(specs.size() == 20);
    json stats = json::parse(read_file(w / "aug1" / "stats.json"));
    CHECK(stats.at("total_pixels").get<std::int64_t>() > 0);

    RunResult dev = run("develop --in " +
                        (w / "aug1" / "frame_0000").string() + " --out " +
                        (w / "frame.ppm").string());
    INFO(dev.err);
    REQUIRE(dev.exit_code == 0);
    std::string ppm = read_file(w / "frame.ppm");
    std::string header = "P6\n96 64\n255\n";
    REQUIRE(ppm.size() == header.size() + 96 * 64 * 3);
    CHECK(ppm.compare(0, header.size(), header) == 0);

    RunResult dev_curve =
        run("develop --in " + (w / "aug1" / "frame_0000").string() +
            " --curve \"{\\\"variant\\\":\\\"parameterized\\\",\\\"gamma\\\":5,"
            "\\\"knee\\\":1,\\\"scale\\\":1}\" --out " +
            (w / "frame_knee.ppm").string());
    INFO(dev_curve.err);
    CHECK(dev_curve.exit_code == 0);
  }

  SUBCASE("variance-stabilized artifacts come with their transform") {
    RunResult ks = run("augment --in " + (w / "b6").string() + " --model " +
                       (w / "model.json").string() + " --mode ksigma --out " +
                       (w / "ks").string());
    INFO(ks.err);
    REQUIRE(ks.exit_code == 0);
    json transform = json::parse(read_file(w / "ks" / "transform.json"));
    CHECK(transform.at("k").get<double>() > 0.0);
    CHECK(transform.at("scale").get<double>() > 0.0);
    json sidecar = json::parse(read_file(w / "ks" / "frame_0000.json"));
    CHECK(sidecar.at("bit_depth").get<int>() == 16);

    RunResult vm = run("augment --in " + (w / "b6").string() + " --model " +
                       (w / "model.json").string() + " --mode varmap --out " +
                       (w / "vm").string());
    REQUIRE(vm.exit_code == 0);
    CHECK(fs::exists(w / "vm" / "frame_0019.raw16"));
  }

  SUBCASE("normality report runs off a stored burst") {
    RunResult norm = run("validate normality --burst " + (w / "b6").string() +
                         " --regions " + (w / "b6" / "regions.json").string() +
                         " --buckets 4 --out " + (w / "norm").string());
    INFO(norm.err);
    REQUIRE(norm.exit_code == 0);
    json j = json::parse(read_file(w / "norm" / "normality.json"));
    CHECK(j.at("buckets").size() == 4);
    CHECK(fs::exists(w / "norm" / "normality_points.csv"));
  }

  SUBCASE("alignment harness writes one report per job") {
    write_text(w / "vparams.json",
               R"({"patch_size":8,"illumination":0.16,"gain_db":6})");
    RunResult va = run("--seed 3 validate alignment --model " +
                       (w / "model.json").string() + " --params " +
                       (w / "vparams.json").string() +
                       " --contrast 0.5 --methods ours --frames 60 --out " +
                       (w / "align").string());
    INFO(va.err);
    REQUIRE(va.exit_code == 0);
    json j = json::parse(read_file(w / "align" / "alignment_ours_x0.5.json"));
    CHECK(j.at("slope_rel_err").get<double>() < 0.15);
    CHECK(fs::exists(w / "align" / "alignment_ours_x0.5_pairs.csv"));
  }
}

TEST_CASE("bench writes a report for a small configuration") {
  fs::path w = workspace();
  write_text(w / "bench_cfg.json", R"({"width":64,"height":64,"repetitions":3})");
  RunResult r = run("bench --config " + (w / "bench_cfg.json").string() +
                    " --out " + (w / "bench.json").string());
  INFO(r.err);
  REQUIRE(r.exit_code == 0);
  json j = json::parse(read_file(w / "bench.json"));
  REQUIRE(j.is_array());
  CHECK(j.size() == 10);
  CHECK(r.out.find("capture") != std::string::npos);
}
