/* Copyright 2026 The dygan Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "dygan/cli/bench.hpp"
#include "dygan/cli/commands.hpp"
#include "dygan/tensor_io.hpp"

using namespace dygan;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dygan_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path.string();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kTinyConfig = R"({
  "generator": {"out_dim": 10},
  "discriminator": {"mel_bins": 10},
  "data": {"utterances_per_speaker": 4, "min_frames": 20, "max_frames": 40},
  "train": {"segment_frames": 16, "batch": 4, "epochs": 5, "log_every": 1}
})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("params on the default config") {
  const Run r = run({"params"});
  CHECK(r.code == 0);
  CHECK(r.out.find("137,752") != std::string::npos);
  CHECK(r.out.find("262,144") != std::string::npos);

  const Run j = run({"params", "--json"});
  REQUIRE(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["dynconv"]["params"] == 137752);
  CHECK(doc["attention_params"] == 262144);
  CHECK(doc["ratio"].get<double>() >= 1.9);
  CHECK(doc["generator"]["total"] == 3807200);
  CHECK(doc["total"].get<std::size_t>() < 10'000'000);
}

TEST_CASE("params rejects bad configs with exit 2") {
  const fs::path dir = scratch("params");
  const Run h = run({"params", "--config", write(dir / "h.json", R"({"generator": {"h": 7}})")});
  CHECK(h.code == 2);
  CHECK(h.err.find("must divide") != std::string::npos);

  const Run syntax =
      run({"params", "--config", write(dir / "s.json", "{\n  \"generator\": {\"h\": 8,,}\n}")});
  CHECK(syntax.code == 2);
  CHECK(syntax.err.find("s.json:2:") != std::string::npos);

  const Run unknown =
      run({"params", "--config", write(dir / "u.json", R"({"generator": {"hiden": 8}})")});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("hiden") != std::string::npos);

  CHECK(run({"params", "--config", (dir / "missing.json").string()}).code == 2);
}

TEST_CASE("usage errors and help") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"gradcheck", "--seeds", "x"}).code == 2);
  CHECK(run({"convert"}).code == 2);
  const Run help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("train-toy") != std::string::npos);
}

TEST_CASE("gradcheck exit status follows the pass flag") {
  CHECK(run({"gradcheck"}).code == 0);
  const Run strict = run({"gradcheck", "--tol", "1e-12", "--layers", "conv1d"});
  CHECK(strict.code == 1);
  CHECK(strict.out.find("FAIL") != std::string::npos);

  const Run one = run({"gradcheck", "--seeds", "1", "--json"});
  REQUIRE(one.code == 0);
  const auto doc = nlohmann::json::parse(one.out);
  CHECK(doc["layers"].size() == 16);
  for (const auto& l : doc["layers"]) CHECK(l["seeds"].size() == 1);
  CHECK(run({"gradcheck", "--layers", "nope"}).code == 2);
}

TEST_CASE("nearest-rank statistics") {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(cli::nearest_rank(v, 50) == 5);
  CHECK(cli::nearest_rank(v, 10) == 1);
  CHECK(cli::nearest_rank(v, 90) == 9);
  CHECK(cli::nearest_rank({4.0}, 10) == 4.0);
  const auto t = cli::summarize(100, {3.0, 1.0, 2.0});
  CHECK(t.median_ms == 2.0);
  CHECK(t.samples_ms == std::vector<double>{3.0, 1.0, 2.0});
  CHECK(t.rtf == doctest::Approx(0.002));
  CHECK(t.frames_per_second == doctest::Approx(50000.0));
}

TEST_CASE("bench output") {
  const Run r = run({"bench", "--lengths", "8,16", "--reps", "1", "--warmup", "0", "--json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  const cli::BenchResult b = cli::bench_from_json(doc);
  CHECK(cli::to_json(b) == doc);
  REQUIRE(b.timings.size() == 2);
  for (const auto& t : b.timings) {
    CHECK(t.p10_ms == t.median_ms);
    CHECK(t.p90_ms == t.median_ms);
    CHECK(t.median_ms > 0.0);
  }
  CHECK(b.dynconv_params == 137752);
  CHECK(doc["note"].get<std::string>().find("vocoder") != std::string::npos);

  const Run threaded = run({"bench", "--lengths", "8", "--reps", "4", "--threads", "2"});
  CHECK(threaded.code == 0);
  CHECK(threaded.out.find("vocoder") != std::string::npos);
  CHECK(run({"bench", "--lengths", "8,0"}).code == 2);
  CHECK(run({"bench", "--reps", "0"}).code == 2);
}

TEST_CASE("train-toy writes deterministic curves and a loadable checkpoint") {
  const fs::path dir = scratch("train");
  const std::string cfg = write(dir / "tiny.json", kTinyConfig);
  const Run a = run({"train-toy", "--config", cfg, "--out", (dir / "a").string()});
  REQUIRE(a.code == 0);
  const Run b = run({"train-toy", "--config", cfg, "--out", (dir / "b").string()});
  REQUIRE(b.code == 0);
  CHECK(slurp(dir / "a" / "curve.jsonl") == slurp(dir / "b" / "curve.jsonl"));
  CHECK(slurp(dir / "a" / "generator.ckpt") == slurp(dir / "b" / "generator.ckpt"));
  CHECK(!slurp(dir / "a" / "curve.jsonl").empty());

  std::istringstream lines(slurp(dir / "a" / "log.jsonl"));
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    const auto rec = nlohmann::json::parse(line);
    CHECK(rec.contains("wall_ms"));
    CHECK(rec["step"] == ++n);
  }
  CHECK(n == 10);
  const auto report = nlohmann::json::parse(slurp(dir / "a" / "report.json"));
  CHECK(report["steps"] == 10);

  const Run c =
      run({"train-toy", "--config", cfg, "--out", (dir / "c").string(), "--seed", "3"});
  REQUIRE(c.code == 0);
  CHECK(slurp(dir / "a" / "curve.jsonl") != slurp(dir / "c" / "curve.jsonl"));

  const Run adv = run({"train-toy", "--config", cfg, "--out", (dir / "adv").string(), "--mode",
                       "adversarial", "--epochs", "1"});
  REQUIRE(adv.code == 0);
  CHECK(slurp(dir / "adv" / "curve.jsonl").find("adv_d") != std::string::npos);
}

TEST_CASE("train-toy edge cases") {
  const fs::path dir = scratch("train_edge");
  const std::string cfg = write(dir / "tiny.json", kTinyConfig);
  const Run zero = run({"train-toy", "--config", cfg, "--out", (dir / "z").string(), "--epochs", "0"});
  CHECK(zero.code == 0);
  CHECK(slurp(dir / "z" / "curve.jsonl").empty());

  const std::string boom = write(dir / "boom.json", R"({
    "generator": {"out_dim": 10}, "discriminator": {"mel_bins": 10},
    "data": {"utterances_per_speaker": 4, "min_frames": 20, "max_frames": 40,
             "scale_min": 1e38, "scale_max": 1e38},
    "train": {"segment_frames": 16, "batch": 4, "epochs": 2}})");
  const Run diverged = run({"train-toy", "--config", boom, "--out", (dir / "d").string()});
  CHECK(diverged.code == 1);
  CHECK(diverged.err.find("step 1") != std::string::npos);

  CHECK(run({"train-toy", "--config", cfg, "--out", (dir / "m").string(), "--mode", "x"}).code == 2);
  CHECK(run({"train-toy", "--config", cfg}).code == 2);
}

TEST_CASE("convert") {
  const fs::path dir = scratch("convert");
  const std::string cfg = write(dir / "tiny.json", kTinyConfig);
  REQUIRE(run({"train-toy", "--config", cfg, "--out", (dir / "run").string(), "--epochs", "1"})
              .code == 0);
  const std::string ckpt = (dir / "run" / "generator.ckpt").string();

  REQUIRE(run({"synth", "--config", cfg, "--frames", "1", "--out", (dir / "s1").string()}).code ==
          0);
  const auto z1 = load_dyt_as<float>(dir / "s1" / "z.dyt");
  CHECK(z1.shape() == Shape{1, 16});
  const std::string spk = (dir / "s1" / "spk.dyt").string();

  const Run one = run({"convert", "--checkpoint", ckpt, "--z", (dir / "s1" / "z.dyt").string(),
                       "--spk", spk, "--out", (dir / "o1.dyt").string()});
  REQUIRE(one.code == 0);
  CHECK(load_dyt_as<float>(dir / "o1.dyt").shape() == Shape{1, 10});

  REQUIRE(run({"synth", "--config", cfg, "--frames", "33", "--speaker", "1", "--out",
               (dir / "s2").string()})
              .code == 0);
  const std::string z2 = (dir / "s2" / "z.dyt").string();
  for (const char* name : {"a.dyt", "b.dyt"})
    REQUIRE(run({"convert", "--checkpoint", ckpt, "--z", z2, "--spk", spk, "--out",
                 (dir / name).string()})
                .code == 0);
  CHECK(slurp(dir / "a.dyt") == slurp(dir / "b.dyt"));

  // f64 inputs are accepted.
  save_dyt(dir / "z64.dyt", load_dyt_as<double>(z2));
  CHECK(run({"convert", "--checkpoint", ckpt, "--z", (dir / "z64.dyt").string(), "--spk", spk,
             "--out", (dir / "c.dyt").string()})
            .code == 0);
  CHECK(slurp(dir / "c.dyt") == slurp(dir / "a.dyt"));

  save_dyt(dir / "bad_z.dyt", Tensor({5, 15}));
  const Run bad = run({"convert", "--checkpoint", ckpt, "--z", (dir / "bad_z.dyt").string(),
                       "--spk", spk, "--out", (dir / "x.dyt").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("[5,15]") != std::string::npos);
  CHECK(bad.err.find("16") != std::string::npos);

  save_dyt(dir / "bad_s.dyt", Tensor({9}));
  const Run bad_s = run({"convert", "--checkpoint", ckpt, "--z", z2, "--spk",
                         (dir / "bad_s.dyt").string(), "--out", (dir / "x.dyt").string()});
  CHECK(bad_s.code == 2);
  CHECK(bad_s.err.find("[8]") != std::string::npos);

  CHECK(run({"convert", "--checkpoint", (dir / "nope.ckpt").string(), "--z", z2, "--spk", spk,
             "--out", (dir / "x.dyt").string()})
            .code == 2);
  CHECK(run({"convert", "--checkpoint", ckpt, "--z", (dir / "nope.dyt").string(), "--spk", spk,
             "--out", (dir / "x.dyt").string()})
            .code == 2);
  CHECK(run({"convert", "--checkpoint", (dir / "run" / "discriminator.ckpt").string(), "--z", z2,
             "--spk", spk, "--out", (dir / "x.dyt").string()})
            .code == 2);
}

}  // TEST_SUITE
