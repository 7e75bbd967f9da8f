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

#include "dygan/cli/config.hpp"

#include <fstream>
#include <sstream>

#include "dygan/errors.hpp"
#include "dygan/model/config_json.hpp"

namespace dygan::cli {

using json_detail::read_field;
using json_detail::require_keys;

nlohmann::json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is 1-based and points one past the offending character.
    const std::size_t pos = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(column) +
                      ": " + e.what());
  }
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path.string());
}

void merge_json(const nlohmann::json& j, TrainConfig& c) {
  require_keys(j,
               {"lr_g", "lr_d", "batch", "segment_frames", "epochs", "seed", "mode",
                "lambda_recon", "recon_norm", "log_every"},
               "train");
  read_field(j, "lr_g", c.lr_g, "train");
  read_field(j, "lr_d", c.lr_d, "train");
  read_field(j, "batch", c.batch, "train");
  read_field(j, "segment_frames", c.segment_frames, "train");
  read_field(j, "epochs", c.epochs, "train");
  std::size_t seed = c.seed;
  read_field(j, "seed", seed, "train");
  c.seed = seed;
  read_field(j, "lambda_recon", c.weights.lambda_recon, "train");
  read_field(j, "log_every", c.log_every, "train");
  if (j.contains("mode")) {
    std::string mode;
    read_field(j, "mode", mode, "train");
    c.mode = parse_train_mode(mode);
  }
  if (j.contains("recon_norm")) {
    std::string norm;
    read_field(j, "recon_norm", norm, "train");
    c.recon_norm = parse_recon_norm(norm);
  }
}

void merge_json(const nlohmann::json& j, SyntheticConfig& c) {
  require_keys(j,
               {"n_speakers", "utterances_per_speaker", "min_frames", "max_frames", "scale_min",
                "scale_max"},
               "data");
  read_field(j, "n_speakers", c.n_speakers, "data");
  read_field(j, "utterances_per_speaker", c.utterances_per_speaker, "data");
  read_field(j, "min_frames", c.min_frames, "data");
  read_field(j, "max_frames", c.max_frames, "data");
  read_field(j, "scale_min", c.scale_min, "data");
  read_field(j, "scale_max", c.scale_max, "data");
}

void merge_setup(const nlohmann::json& j, ToySetup& setup) {
  require_keys(j, {"generator", "discriminator", "train", "data"}, "config");
  if (j.contains("generator")) merge_json(j["generator"], setup.generator);
  if (j.contains("discriminator")) merge_json(j["discriminator"], setup.discriminator);
  if (j.contains("train")) merge_json(j["train"], setup.train);
  if (j.contains("data")) merge_json(j["data"], setup.data);
}

nlohmann::json setup_to_json(const ToySetup& s) {
  const TrainConfig& t = s.train;
  const SyntheticConfig& d = s.data;
  return {{"generator", s.generator},
          {"discriminator", s.discriminator},
          {"train",
           {{"lr_g", t.lr_g},
            {"lr_d", t.lr_d},
            {"batch", t.batch},
            {"segment_frames", t.segment_frames},
            {"epochs", t.epochs},
            {"seed", t.seed},
            {"mode", to_string(t.mode)},
            {"lambda_recon", t.weights.lambda_recon},
            {"recon_norm", to_string(t.recon_norm)},
            {"log_every", t.log_every}}},
          {"data",
           {{"n_speakers", d.n_speakers},
            {"utterances_per_speaker", d.utterances_per_speaker},
            {"min_frames", d.min_frames},
            {"max_frames", d.max_frames},
            {"scale_min", d.scale_min},
            {"scale_max", d.scale_max}}}};
}

ToySetup paper_setup() {
  ToySetup s;  // GeneratorConfig / DiscriminatorConfig defaults are paper scale
  return s;
}

ToySetup load_setup(const std::filesystem::path& path, ToySetup base) {
  if (!path.empty()) merge_setup(read_json_file(path), base);
  base.validate();
  return base;
}

}  // namespace dygan::cli
