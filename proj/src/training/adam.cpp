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

#include "dygan/training/adam.hpp"

#include <cmath>

namespace dygan {

template <typename T>
const typename Adam<T>::Moments* Adam<T>::moments(const std::string& name) const {
  auto it = moments_.find(name);
  return it == moments_.end() ? nullptr : &it->second;
}

template <typename T>
void Adam<T>::step(const std::vector<ParamSlot<T>>& slots) {
  for (const auto& s : slots) {
    if (!s.value || !s.grad) throw ContractError("Adam: empty slot " + s.name);
    if (s.value->shape() != s.grad->shape())
      throw ContractError("Adam: gradient for " + s.name + " has shape " +
                          shape_str(s.grad->shape()) + ", parameter has " +
                          shape_str(s.value->shape()));
  }
  ++steps_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (const auto& s : slots) {
    auto [it, fresh] = moments_.try_emplace(s.name);
    Moments& m = it->second;
    if (fresh) {
      m.first = s.value->zeros_like();
      m.second = s.value->zeros_like();
    } else if (m.first.shape() != s.value->shape()) {
      throw ContractError("Adam: parameter " + s.name + " changed shape");
    }
    BasicTensor<T>& p = *s.value;
    const BasicTensor<T>& g = *s.grad;
    for (std::size_t i = 0; i < p.numel(); ++i) {
      const double gi = g[i];
      const double mi = b1 * m.first[i] + (1.0 - b1) * gi;
      const double vi = b2 * m.second[i] + (1.0 - b2) * gi * gi;
      m.first[i] = static_cast<T>(mi);
      m.second[i] = static_cast<T>(vi);
      const double update = options_.lr * (mi / c1) / (std::sqrt(vi / c2) + options_.eps);
      p[i] = static_cast<T>(p[i] - update);
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace dygan
