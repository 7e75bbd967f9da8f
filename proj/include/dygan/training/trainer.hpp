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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dygan/model/discriminator.hpp"
#include "dygan/model/generator.hpp"
#include "dygan/training/data.hpp"
#include "dygan/training/losses.hpp"

namespace dygan {

enum class TrainMode { recon_only, adversarial };

TrainMode parse_train_mode(const std::string& s);
const char* to_string(TrainMode m);

struct TrainConfig {
  double lr_g = 1e-4;
  double lr_d = 2e-5;
  std::size_t batch = 8;
  std::size_t segment_frames = kSegmentFrames;
  std::size_t epochs = 1;
  std::uint64_t seed = 0;
  TrainMode mode = TrainMode::recon_only;
  LossWeights weights;
  ReconNorm recon_norm = ReconNorm::l1;
  std::size_t log_every = 10;

  void validate() const;
};

// Everything a toy run needs; defaults are a desk-scale model that trains in
// well under a minute on one core.
struct ToySetup {
  GeneratorConfig generator;
  DiscriminatorConfig discriminator;
  SyntheticConfig data;
  TrainConfig train;

  static ToySetup defaults();
  void validate() const;
};

struct LogRecord {
  std::size_t step = 0;
  double recon = 0.0;
  std::optional<double> adv_g;  // absent in recon-only mode
  std::optional<double> adv_d;
  double wall_ms = 0.0;
};

struct TrainReport {
  std::vector<LogRecord> curve;
  std::size_t steps = 0;
  std::size_t steps_per_epoch = 0;
  // Mean reconstruction error over the full training utterances after training.
  double final_recon = 0.0;
  // Same error for a model that always predicts zeros.
  double zero_baseline = 0.0;
  // Extremes of every discriminator output seen during adversarial training.
  std::optional<double> d_min;
  std::optional<double> d_max;
};

struct TrainResult {
  TrainReport report;
  Generator<float> generator;
  Discriminator<float> discriminator;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// Seeds derived from TrainConfig::seed; shared with tools that rebuild the
// synthetic task for evaluation.
std::uint64_t task_seed(std::uint64_t seed);
std::uint64_t heldout_seed(std::uint64_t seed);

// Trains on the synthetic task. Losses that become non-finite raise
// TrainingError carrying the step index.
TrainResult train_toy(const ToySetup& setup,
                      const std::function<void(const LogRecord&)>& on_log = {});

// Mean reconstruction error of `g` over whole utterances, one at a time.
double evaluate_recon(const Generator<float>& g, const SyntheticTask<float>& task,
                      const std::vector<Utterance<float>>& data, ReconNorm norm);

}  // namespace dygan
