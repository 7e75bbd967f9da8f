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

#include "json.hpp"

#include "dygan/model/discriminator.hpp"
#include "dygan/model/generator.hpp"

namespace dygan {

// Strict conversions: unknown keys raise ConfigError naming the key; missing
// keys keep the value already present in the target.
void to_json(nlohmann::json& j, const GeneratorConfig& c);
void merge_json(const nlohmann::json& j, GeneratorConfig& c);
void to_json(nlohmann::json& j, const DiscriminatorConfig& c);
void merge_json(const nlohmann::json& j, DiscriminatorConfig& c);

namespace json_detail {
// Throws ConfigError if `j` is not an object or has a key outside `allowed`.
void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                  const char* section);
template <typename V>
void read_field(const nlohmann::json& j, const char* key, V& out, const char* section);
}  // namespace json_detail

}  // namespace dygan
