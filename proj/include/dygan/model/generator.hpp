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
#include <string>
#include <string_view>
#include <vector>

#include "dygan/layers.hpp"

namespace dygan {

struct GeneratorConfig {
  std::size_t in_dim = 512;   // content feature width
  std::size_t hidden = 256;
  std::size_t out_dim = 80;   // mel bins
  std::size_t n_blocks = 6;
  std::size_t k = 3;          // dynamic convolution kernel size
  std::size_t h = 8;          // dynamic convolution heads
  std::size_t spk_dim = 128;
  std::size_t conv_kernel = 3;  // input conv and in-block conv widths
  bool softmax_kernel = false;

  // Throws ConfigError naming the violated constraint.
  void validate() const;
  bool operator==(const GeneratorConfig&) const = default;
};

/// One intermediate block: two pre-norm residual sub-blocks.
///
///   h1 = h  + DynConv(LN1(h))
///   h2 = h1 + WadaINConv(Conv1d(LN2(h1)), s)
template <typename T>
struct GeneratorBlock {
  LayerNorm<T> norm1;
  DynConvLayer<T> dynconv;
  LayerNorm<T> norm2;
  Conv1d<T> conv;
  WadaINConv<T> wadain;

  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) {
    norm1.for_each_param(param_name(prefix, "norm1"), f);
    dynconv.for_each_param(param_name(prefix, "dynconv"), f);
    norm2.for_each_param(param_name(prefix, "norm2"), f);
    conv.for_each_param(param_name(prefix, "conv"), f);
    wadain.for_each_param(param_name(prefix, "wadain"), f);
  }
  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) const {
    norm1.for_each_param(param_name(prefix, "norm1"), f);
    dynconv.for_each_param(param_name(prefix, "dynconv"), f);
    norm2.for_each_param(param_name(prefix, "norm2"), f);
    conv.for_each_param(param_name(prefix, "conv"), f);
    wadain.for_each_param(param_name(prefix, "wadain"), f);
  }
};

template <typename T>
struct GeneratorBlockCache {
  BasicTensor<T> input;
  LayerNormCache<T> norm1;
  DynConvCache<T> dynconv;
  LayerNormCache<T> norm2;
  BasicTensor<T> conv_input;
  WadaINCache<T> wadain;
};

template <typename T>
struct GeneratorCache {
  BasicTensor<T> z;
  std::vector<GeneratorBlockCache<T>> blocks;
  BasicTensor<T> last_hidden;
};

/// Maps content features z [b, t, in_dim] and target speaker embeddings
/// s [b, spk_dim] to mel frames [b, t, out_dim]. Non-autoregressive: every
/// frame is produced in one pass and the time extent is preserved.
template <typename T>
class Generator {
 public:
  Generator() = default;
  // Weights and biases start at zero; norm gains and gamma biases at one.
  explicit Generator(const GeneratorConfig& config);
  static Generator init(const GeneratorConfig& config, std::uint64_t seed);

  const GeneratorConfig& config() const { return config_; }

  BasicTensor<T> forward(const BasicTensor<T>& z, const BasicTensor<T>& s,
                         GeneratorCache<T>* cache = nullptr) const;

  struct InputGrads {
    BasicTensor<T> z;
    BasicTensor<T> s;
  };
  // Accumulates parameter gradients into `grads` (same configuration).
  InputGrads backward(const GeneratorCache<T>& cache, const BasicTensor<T>& grad_out,
                      Generator& grads) const;

  Generator zeros_like() const;

  Conv1d<T> input_conv;
  std::vector<GeneratorBlock<T>> blocks;
  Conv1d<T> output_conv;

  template <typename F>
  void for_each_param(F&& f) {
    input_conv.for_each_param("input_conv", f);
    for (std::size_t i = 0; i < blocks.size(); ++i)
      blocks[i].for_each_param("blocks." + std::to_string(i), f);
    output_conv.for_each_param("output_conv", f);
  }
  template <typename F>
  void for_each_param(F&& f) const {
    input_conv.for_each_param("input_conv", f);
    for (std::size_t i = 0; i < blocks.size(); ++i)
      blocks[i].for_each_param("blocks." + std::to_string(i), f);
    output_conv.for_each_param("output_conv", f);
  }

 private:
  GeneratorConfig config_;
};

}  // namespace dygan
