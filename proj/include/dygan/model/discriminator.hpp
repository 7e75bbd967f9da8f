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
#include <vector>

#include "dygan/layers.hpp"

namespace dygan {

struct DiscriminatorConfig {
  std::size_t mel_bins = 80;
  std::size_t base_channels = 32;
  std::size_t max_channels = 128;
  std::size_t n_blocks = 4;
  double leaky_slope = kLeakySlope;

  void validate() const;
  // Block i maps channels(i) -> channels(i + 1); channels(0) is the stem width.
  std::size_t channels(std::size_t stage) const;
  // Shortest input that survives every pooling stage.
  std::size_t min_frames() const { return std::size_t{1} << n_blocks; }
  bool operator==(const DiscriminatorConfig&) const = default;
};

/// Downsampling residual block:
///   out = (pool(shortcut(x)) + conv2(lrelu(pool(conv1(lrelu(x)))))) / sqrt(2)
/// The shortcut is a 1x1 convolution when the channel count changes.
template <typename T>
struct DiscriminatorBlock {
  Conv2d<T> conv1;
  Conv2d<T> conv2;
  bool learned_shortcut = false;
  Conv2d<T> shortcut;

  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) {
    conv1.for_each_param(param_name(prefix, "conv1"), f);
    conv2.for_each_param(param_name(prefix, "conv2"), f);
    if (learned_shortcut) shortcut.for_each_param(param_name(prefix, "shortcut"), f);
  }
  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) const {
    conv1.for_each_param(param_name(prefix, "conv1"), f);
    conv2.for_each_param(param_name(prefix, "conv2"), f);
    if (learned_shortcut) shortcut.for_each_param(param_name(prefix, "shortcut"), f);
  }
};

template <typename T>
struct DiscriminatorBlockCache {
  BasicTensor<T> input;
  BasicTensor<T> conv1_input;  // lrelu(x)
  BasicTensor<T> conv1_output;
  BasicTensor<T> pooled;       // pool(conv1(...)), pre-activation
  BasicTensor<T> conv2_input;  // lrelu(pooled)
  BasicTensor<T> shortcut_output;
};

template <typename T>
struct DiscriminatorCache {
  BasicTensor<T> image;  // input viewed as [b, t, mel_bins, 1]
  BasicTensor<T> stem_output;
  std::vector<DiscriminatorBlockCache<T>> blocks;
  BasicTensor<T> last_block_output;
  BasicTensor<T> out_conv_input;
  BasicTensor<T> out_conv_output;
  BasicTensor<T> pooled_input;  // lrelu(out_conv_output)
  BasicTensor<T> head_input;    // [b, 1, 1, c]
  BasicTensor<T> probability;   // [b, 1]
};

/// Unconditional real/fake critic over mel segments [b, t, mel_bins].
/// The input is treated as a one-channel image (time x frequency):
/// stem conv, residual blocks, conv, global average pool, 1x1 conv, sigmoid.
template <typename T>
class Discriminator {
 public:
  Discriminator() = default;
  explicit Discriminator(const DiscriminatorConfig& config);
  static Discriminator init(const DiscriminatorConfig& config, std::uint64_t seed);

  const DiscriminatorConfig& config() const { return config_; }

  // Probabilities in (0, 1), shape [b, 1].
  BasicTensor<T> forward(const BasicTensor<T>& x, DiscriminatorCache<T>* cache = nullptr) const;
  // Gradient w.r.t. x given dL/d(probability); accumulates parameter
  // gradients into `grads`.
  BasicTensor<T> backward(const DiscriminatorCache<T>& cache, const BasicTensor<T>& grad_out,
                          Discriminator& grads) const;

  Discriminator zeros_like() const;

  Conv2d<T> input_conv;
  std::vector<DiscriminatorBlock<T>> blocks;
  Conv2d<T> output_conv;
  Conv2d<T> head;

  template <typename F>
  void for_each_param(F&& f) {
    input_conv.for_each_param("input_conv", f);
    for (std::size_t i = 0; i < blocks.size(); ++i)
      blocks[i].for_each_param("blocks." + std::to_string(i), f);
    output_conv.for_each_param("output_conv", f);
    head.for_each_param("head", f);
  }
  template <typename F>
  void for_each_param(F&& f) const {
    input_conv.for_each_param("input_conv", f);
    for (std::size_t i = 0; i < blocks.size(); ++i)
      blocks[i].for_each_param("blocks." + std::to_string(i), f);
    output_conv.for_each_param("output_conv", f);
    head.for_each_param("head", f);
  }

 private:
  DiscriminatorConfig config_;
};

}  // namespace dygan
