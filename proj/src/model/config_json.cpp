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

#include "dygan/model/config_json.hpp"

#include <cstdint>
#include <string>

namespace dygan {

namespace json_detail {

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                  const char* section) {
  if (!j.is_object()) throw ConfigError(std::string(section) + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(std::string(section) + ": unknown key \"" + key + "\"");
  }
}

template <typename V>
void read_field(const nlohmann::json& j, const char* key, V& out, const char* section) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    if constexpr (std::is_same_v<V, std::size_t>) {
      const bool non_negative =
          it->is_number_unsigned() || (it->is_number_integer() && it->get<std::int64_t>() >= 0);
      if (!non_negative)
        throw ConfigError(std::string(section) + "." + key + ": expected a non-negative integer");
    } else if constexpr (std::is_same_v<V, bool>) {
      if (!it->is_boolean())
        throw ConfigError(std::string(section) + "." + key + ": expected a boolean");
    } else if constexpr (std::is_floating_point_v<V>) {
      if (!it->is_number())
        throw ConfigError(std::string(section) + "." + key + ": expected a number");
    }
    out = it->template get<V>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(section) + "." + key + ": " + e.what());
  }
}

template void read_field<std::size_t>(const nlohmann::json&, const char*, std::size_t&,
                                      const char*);
template void read_field<bool>(const nlohmann::json&, const char*, bool&, const char*);
template void read_field<double>(const nlohmann::json&, const char*, double&, const char*);
template void read_field<std::string>(const nlohmann::json&, const char*, std::string&,
                                      const char*);

}  // namespace json_detail

using json_detail::read_field;
using json_detail::require_keys;

void to_json(nlohmann::json& j, const GeneratorConfig& c) {
  j = {{"in_dim", c.in_dim},   {"hidden", c.hidden},   {"out_dim", c.out_dim},
       {"n_blocks", c.n_blocks}, {"k", c.k},           {"h", c.h},
       {"spk_dim", c.spk_dim}, {"conv_kernel", c.conv_kernel},
       {"softmax_kernel", c.softmax_kernel}};
}

void merge_json(const nlohmann::json& j, GeneratorConfig& c) {
  constexpr const char* s = "generator";
  require_keys(j, {"in_dim", "hidden", "out_dim", "n_blocks", "k", "h", "spk_dim", "conv_kernel",
                   "softmax_kernel"},
               s);
  read_field(j, "in_dim", c.in_dim, s);
  read_field(j, "hidden", c.hidden, s);
  read_field(j, "out_dim", c.out_dim, s);
  read_field(j, "n_blocks", c.n_blocks, s);
  read_field(j, "k", c.k, s);
  read_field(j, "h", c.h, s);
  read_field(j, "spk_dim", c.spk_dim, s);
  read_field(j, "conv_kernel", c.conv_kernel, s);
  read_field(j, "softmax_kernel", c.softmax_kernel, s);
}

void to_json(nlohmann::json& j, const DiscriminatorConfig& c) {
  j = {{"mel_bins", c.mel_bins},
       {"base_channels", c.base_channels},
       {"max_channels", c.max_channels},
       {"n_blocks", c.n_blocks},
       {"leaky_slope", c.leaky_slope}};
}

void merge_json(const nlohmann::json& j, DiscriminatorConfig& c) {
  constexpr const char* s = "discriminator";
  require_keys(j, {"mel_bins", "base_channels", "max_channels", "n_blocks", "leaky_slope"}, s);
  read_field(j, "mel_bins", c.mel_bins, s);
  read_field(j, "base_channels", c.base_channels, s);
  read_field(j, "max_channels", c.max_channels, s);
  read_field(j, "n_blocks", c.n_blocks, s);
  read_field(j, "leaky_slope", c.leaky_slope, s);
}

}  // namespace dygan
