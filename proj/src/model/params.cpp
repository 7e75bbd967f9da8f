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

#include "dygan/model/params.hpp"

namespace dygan {

std::size_t generator_param_count(const GeneratorConfig& cfg) {
  cfg.validate();
  const std::size_t c = cfg.hidden;
  const std::size_t block = LayerNorm<float>::param_count(c) +
                            DynConvLayer<float>::param_count(c, cfg.k, cfg.h) +
                            LayerNorm<float>::param_count(c) +
                            Conv1d<float>::param_count(c, c, cfg.conv_kernel) +
                            WadaINConv<float>::param_count(c, c, cfg.conv_kernel, cfg.spk_dim);
  return Conv1d<float>::param_count(cfg.in_dim, c, cfg.conv_kernel) + cfg.n_blocks * block +
         Conv1d<float>::param_count(c, cfg.out_dim, 1);
}

std::size_t discriminator_param_count(const DiscriminatorConfig& cfg) {
  cfg.validate();
  std::size_t total = Conv2d<float>::param_count(1, cfg.channels(0), 3, 3);
  for (std::size_t i = 0; i < cfg.n_blocks; ++i) {
    const std::size_t ci = cfg.channels(i), co = cfg.channels(i + 1);
    total += Conv2d<float>::param_count(ci, ci, 3, 3) + Conv2d<float>::param_count(ci, co, 3, 3);
    if (ci != co) total += Conv2d<float>::param_count(ci, co, 1, 1);
  }
  const std::size_t c = cfg.channels(cfg.n_blocks);
  return total + Conv2d<float>::param_count(c, c, 3, 3) + Conv2d<float>::param_count(c, 1, 1, 1);
}

}  // namespace dygan
