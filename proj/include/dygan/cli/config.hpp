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

#include <filesystem>
#include <string>

#include "json.hpp"

#include "dygan/training/trainer.hpp"

namespace dygan::cli {

// Parses JSON text. Syntax errors raise ConfigError reading
// "<origin>:<line>:<column>: ...".
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);
nlohmann::json read_json_file(const std::filesystem::path& path);

// Overlays the "generator", "discriminator", "train" and "data" sections of
// `j` onto `setup`. Any other key is an error.
void merge_setup(const nlohmann::json& j, ToySetup& setup);
nlohmann::json setup_to_json(const ToySetup& setup);

void merge_json(const nlohmann::json& j, TrainConfig& c);
void merge_json(const nlohmann::json& j, SyntheticConfig& c);

// Paper-scale networks; used by `params` and `bench`.
ToySetup paper_setup();

// `base` overlaid with the file at `path` (if non-empty), then validated.
ToySetup load_setup(const std::filesystem::path& path, ToySetup base);

}  // namespace dygan::cli
