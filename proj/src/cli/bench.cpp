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

#include "dygan/cli/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "dygan/errors.hpp"
#include "dygan/layers/lconv.hpp"
#include "dygan/model/config_json.hpp"

namespace dygan::cli {

double nearest_rank(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw ContractError("nearest_rank: empty sample");
  const auto n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted[rank - 1];
}

LengthTiming summarize(std::size_t frames, std::vector<double> samples_ms) {
  LengthTiming t;
  t.frames = frames;
  t.samples_ms = samples_ms;
  std::sort(samples_ms.begin(), samples_ms.end());
  t.median_ms = nearest_rank(samples_ms, 50);
  t.p10_ms = nearest_rank(samples_ms, 10);
  t.p90_ms = nearest_rank(samples_ms, 90);
  const double seconds = t.median_ms / 1000.0;
  t.frames_per_second = static_cast<double>(frames) / seconds;
  t.rtf = seconds / (static_cast<double>(frames) * kHopSeconds);
  return t;
}

namespace {

double time_forward_ms(const Generator<float>& g, const Tensor& z, const Tensor& s) {
  const auto start = std::chrono::steady_clock::now();
  Tensor y = g.forward(z, s);
  const auto stop = std::chrono::steady_clock::now();
  if (y.numel() == 0) throw ContractError("bench: empty generator output");
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

}  // namespace

BenchResult run_bench(const GeneratorConfig& config, const BenchOptions& options) {
  config.validate();
  if (options.reps == 0) throw ConfigError("bench: --reps must be >= 1");
  if (options.threads == 0) throw ConfigError("bench: --threads must be >= 1");
  if (options.lengths.empty()) throw ConfigError("bench: --lengths must not be empty");

  BenchResult r;
  r.generator = config;
  r.reps = options.reps;
  r.warmup = options.warmup;
  r.threads = options.threads;
  r.dynconv_params = DynConvLayer<float>::param_count(config.hidden, config.k, config.h);
  r.attention_params = attention_projection_params(config.hidden);
  r.param_ratio = static_cast<double>(r.attention_params) / static_cast<double>(r.dynconv_params);

  const Generator<float> g = Generator<float>::init(config, options.seed);
  Rng rng(options.seed);
  for (const std::size_t frames : options.lengths) {
    if (frames == 0) throw ConfigError("bench: lengths must be >= 1");
    const Tensor z = Tensor::randn({1, frames, config.in_dim}, rng);
    const Tensor s = Tensor::randn({1, config.spk_dim}, rng);
    for (std::size_t i = 0; i < options.warmup; ++i) time_forward_ms(g, z, s);

    std::vector<double> samples(options.reps);
    if (options.threads == 1) {
      for (auto& v : samples) v = time_forward_ms(g, z, s);
    } else {
      // Repetitions are independent; each worker takes a strided share.
      std::vector<std::thread> workers;
      const std::size_t n = std::min(options.threads, options.reps);
      for (std::size_t w = 0; w < n; ++w)
        workers.emplace_back([&, w] {
          for (std::size_t i = w; i < samples.size(); i += n) samples[i] = time_forward_ms(g, z, s);
        });
      for (auto& t : workers) t.join();
    }
    r.timings.push_back(summarize(frames, std::move(samples)));
  }
  return r;
}

nlohmann::json to_json(const BenchResult& r) {
  nlohmann::json timings = nlohmann::json::array();
  for (const auto& t : r.timings)
    timings.push_back({{"frames", t.frames},
                       {"samples_ms", t.samples_ms},
                       {"median_ms", t.median_ms},
                       {"p10_ms", t.p10_ms},
                       {"p90_ms", t.p90_ms},
                       {"frames_per_second", t.frames_per_second},
                       {"rtf", t.rtf}});
  return {{"generator", r.generator},
          {"reps", r.reps},
          {"warmup", r.warmup},
          {"threads", r.threads},
          {"hop_seconds", kHopSeconds},
          {"timings", timings},
          {"dynconv_params", r.dynconv_params},
          {"attention_params", r.attention_params},
          {"param_ratio", r.param_ratio},
          {"note", "generator only; vocoder time is excluded, so RTF is not comparable to "
                   "end-to-end figures"}};
}

BenchResult bench_from_json(const nlohmann::json& j) {
  BenchResult r;
  merge_json(j.at("generator"), r.generator);
  r.reps = j.at("reps").get<std::size_t>();
  r.warmup = j.at("warmup").get<std::size_t>();
  r.threads = j.at("threads").get<std::size_t>();
  for (const auto& t : j.at("timings")) {
    LengthTiming lt;
    lt.frames = t.at("frames").get<std::size_t>();
    lt.samples_ms = t.at("samples_ms").get<std::vector<double>>();
    lt.median_ms = t.at("median_ms").get<double>();
    lt.p10_ms = t.at("p10_ms").get<double>();
    lt.p90_ms = t.at("p90_ms").get<double>();
    lt.frames_per_second = t.at("frames_per_second").get<double>();
    lt.rtf = t.at("rtf").get<double>();
    r.timings.push_back(std::move(lt));
  }
  r.dynconv_params = j.at("dynconv_params").get<std::size_t>();
  r.attention_params = j.at("attention_params").get<std::size_t>();
  r.param_ratio = j.at("param_ratio").get<double>();
  return r;
}

}  // namespace dygan::cli
