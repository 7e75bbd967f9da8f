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
#include <map>
#include <string>
#include <vector>

#include "dygan/tensor.hpp"

namespace dygan {

struct AdamOptions {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename T>
struct ParamSlot {
  std::string name;
  BasicTensor<T>* value = nullptr;
  const BasicTensor<T>* grad = nullptr;
};

/// Bias-corrected Adam. Moments are keyed by parameter name and created on
/// first use.
template <typename T>
class Adam {
 public:
  struct Moments {
    BasicTensor<T> first;
    BasicTensor<T> second;
  };

  explicit Adam(AdamOptions options = {}) : options_(options) {}

  const AdamOptions& options() const { return options_; }
  std::int64_t steps() const { return steps_; }
  const Moments* moments(const std::string& name) const;

  // One update of every slot. Throws ContractError on shape disagreement.
  void step(const std::vector<ParamSlot<T>>& slots);

  // Walks `net` and `grads` registries in lockstep.
  template <typename Net>
  void step(Net& net, const Net& grads) {
    std::vector<ParamSlot<T>> slots;
    net.for_each_param([&](const std::string& name, BasicTensor<T>& p) {
      slots.push_back({name, &p, nullptr});
    });
    std::size_t i = 0;
    grads.for_each_param([&](const std::string& name, const BasicTensor<T>& g) {
      if (i >= slots.size() || slots[i].name != name)
        throw ContractError("Adam: gradient registry does not match parameters at " + name);
      slots[i++].grad = &g;
    });
    if (i != slots.size()) throw ContractError("Adam: gradient registry is incomplete");
    step(slots);
  }

 private:
  AdamOptions options_;
  std::int64_t steps_ = 0;
  std::map<std::string, Moments> moments_;
};

}  // namespace dygan
