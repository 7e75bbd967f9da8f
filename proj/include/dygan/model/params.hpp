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
#include <string>
#include <vector>

#include "dygan/model/discriminator.hpp"
#include "dygan/model/generator.hpp"

namespace dygan {

struct LayerParams {
  std::string layer;  // registry prefix, e.g. "blocks.0.dynconv"
  std::size_t count = 0;
};

struct ParamBreakdown {
  std::vector<LayerParams> layers;  // registry order
  std::size_t total = 0;
};

// Groups registry entries by layer (name up to the last '.') in first-seen order.
template <typename Net>
ParamBreakdown count_params(const Net& net) {
  ParamBreakdown out;
  net.for_each_param([&](const std::string& name, const auto& tensor) {
    const auto dot = name.rfind('.');
    std::string layer = dot == std::string::npos ? name : name.substr(0, dot);
    if (out.layers.empty() || out.layers.back().layer != layer) out.layers.push_back({layer, 0});
    out.layers.back().count += tensor.numel();
    out.total += tensor.numel();
  });
  return out;
}

// Closed-form counts, independent of any instantiated network.
std::size_t generator_param_count(const GeneratorConfig& config);
std::size_t discriminator_param_count(const DiscriminatorConfig& config);

}  // namespace dygan
