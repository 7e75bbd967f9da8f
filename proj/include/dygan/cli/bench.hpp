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

#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "dygan/model/generator.hpp"

namespace dygan::cli {

inline constexpr double kHopSeconds = 0.01;

struct BenchOptions {
  std::vector<std::size_t> lengths{128, 256, 512, 1024};
  std::size_t reps = 5;
  std::size_t warmup = 1;
  std::size_t threads = 1;
  std::uint64_t seed = 0;
};

struct LengthTiming {
  std::size_t frames = 0;
  std::vector<double> samples_ms;  // in run order
  double median_ms = 0.0;
  double p10_ms = 0.0;
  double p90_ms = 0.0;
  double frames_per_second = 0.0;
  // Wall seconds per second of audio at a 10 ms hop.
  double rtf = 0.0;
};

struct BenchResult {
  GeneratorConfig generator;
  std::size_t reps = 0;
  std::size_t warmup = 0;
  std::size_t threads = 1;
  std::vector<LengthTiming> timings;
  std::size_t dynconv_params = 0;
  std::size_t attention_params = 0;
  double param_ratio = 0.0;  // attention / dynconv
};

// Nearest-rank percentile (p in [0, 100]) of an ascending sample.
double nearest_rank(const std::vector<double>& sorted, double p);

LengthTiming summarize(std::size_t frames, std::vector<double> samples_ms);

BenchResult run_bench(const GeneratorConfig& config, const BenchOptions& options);

nlohmann::json to_json(const BenchResult& r);
BenchResult bench_from_json(const nlohmann::json& j);

}  // namespace dygan::cli
