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

#include "dygan/model/discriminator.hpp"

#include <algorithm>
#include <cmath>

namespace dygan {

void DiscriminatorConfig::validate() const {
  if (mel_bins == 0) throw ConfigError("discriminator.mel_bins must be >= 1");
  if (base_channels == 0) throw ConfigError("discriminator.base_channels must be >= 1");
  if (max_channels < base_channels)
    throw ConfigError("discriminator.max_channels must be >= base_channels");
  if (n_blocks == 0 || n_blocks > 16) throw ConfigError("discriminator.n_blocks must be in [1, 16]");
  if (!(leaky_slope >= 0.0 && leaky_slope < 1.0))
    throw ConfigError("discriminator.leaky_slope must be in [0, 1)");
}

std::size_t DiscriminatorConfig::channels(std::size_t stage) const {
  std::size_t c = base_channels;
  for (std::size_t i = 0; i < stage && c < max_channels; ++i) c *= 2;
  return std::min(c, max_channels);
}

template <typename T>
Discriminator<T>::Discriminator(const DiscriminatorConfig& config) : config_(config) {
  config.validate();
  input_conv = Conv2d<T>(1, config.channels(0), 3, 3);
  blocks.resize(config.n_blocks);
  for (std::size_t i = 0; i < config.n_blocks; ++i) {
    const std::size_t ci = config.channels(i), co = config.channels(i + 1);
    auto& b = blocks[i];
    b.conv1 = Conv2d<T>(ci, ci, 3, 3);
    b.conv2 = Conv2d<T>(ci, co, 3, 3);
    b.learned_shortcut = ci != co;
    if (b.learned_shortcut) b.shortcut = Conv2d<T>(ci, co, 1, 1);
  }
  const std::size_t c = config.channels(config.n_blocks);
  output_conv = Conv2d<T>(c, c, 3, 3);
  head = Conv2d<T>(c, 1, 1, 1);
}

template <typename T>
Discriminator<T> Discriminator<T>::init(const DiscriminatorConfig& config, std::uint64_t seed) {
  Discriminator d(config);
  Rng rng(seed);
  d.input_conv = Conv2d<T>::init(1, config.channels(0), 3, 3, rng);
  for (std::size_t i = 0; i < config.n_blocks; ++i) {
    const std::size_t ci = config.channels(i), co = config.channels(i + 1);
    auto& b = d.blocks[i];
    b.conv1 = Conv2d<T>::init(ci, ci, 3, 3, rng);
    b.conv2 = Conv2d<T>::init(ci, co, 3, 3, rng);
    if (b.learned_shortcut) b.shortcut = Conv2d<T>::init(ci, co, 1, 1, rng);
  }
  const std::size_t c = config.channels(config.n_blocks);
  d.output_conv = Conv2d<T>::init(c, c, 3, 3, rng);
  d.head = Conv2d<T>::init(c, 1, 1, 1, rng);
  return d;
}

template <typename T>
Discriminator<T> Discriminator<T>::zeros_like() const {
  Discriminator d = *this;
  d.for_each_param([](const std::string&, BasicTensor<T>& p) { p.set_zero(); });
  return d;
}

template <typename T>
BasicTensor<T> Discriminator<T>::forward(const BasicTensor<T>& x,
                                         DiscriminatorCache<T>* cache) const {
  require_rank(x.shape(), 3, "discriminator input");
  const std::size_t b = x.dim(0), t = x.dim(1);
  if (x.dim(2) != config_.mel_bins)
    throw DimensionError("discriminator: input " + shape_str(x.shape()) + " does not have " +
                         std::to_string(config_.mel_bins) + " mel bins");
  if (t < config_.min_frames())
    throw DimensionError("discriminator: need at least " + std::to_string(config_.min_frames()) +
                         " frames, got " + std::to_string(t));
  const double slope = config_.leaky_slope;
  const T inv_sqrt2 = static_cast<T>(1.0 / std::sqrt(2.0));
  const AvgPool2d pool;

  BasicTensor<T> image = x.reshaped({b, t, config_.mel_bins, 1});
  BasicTensor<T> h = input_conv.forward(image);
  if (cache) {
    cache->image = std::move(image);
    cache->stem_output = h;
    cache->blocks.assign(blocks.size(), {});
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& blk = blocks[i];
    BasicTensor<T> a1 = leaky_relu(h, slope);
    BasicTensor<T> c1 = blk.conv1.forward(a1);
    BasicTensor<T> p1 = pool.forward(c1);
    BasicTensor<T> a2 = leaky_relu(p1, slope);
    BasicTensor<T> res = blk.conv2.forward(a2);
    BasicTensor<T> sc = blk.learned_shortcut ? blk.shortcut.forward(h) : h;
    BasicTensor<T> out = pool.forward(sc);
    out += res;
    out *= inv_sqrt2;
    if (cache) {
      auto& bc = cache->blocks[i];
      bc.input = std::move(h);
      bc.conv1_input = std::move(a1);
      bc.conv1_output = std::move(c1);
      bc.pooled = std::move(p1);
      bc.conv2_input = std::move(a2);
      bc.shortcut_output = std::move(sc);
    }
    h = std::move(out);
  }
  BasicTensor<T> a = leaky_relu(h, slope);
  BasicTensor<T> oc = output_conv.forward(a);
  BasicTensor<T> a_out = leaky_relu(oc, slope);
  BasicTensor<T> pooled = global_avg_pool(a_out);
  const std::size_t c = pooled.dim(1);
  BasicTensor<T> head_in = std::move(pooled).reshaped({b, 1, 1, c});
  BasicTensor<T> logit = head.forward(head_in).reshaped({b, 1});
  BasicTensor<T> prob = sigmoid(logit);
  if (cache) {
    cache->last_block_output = std::move(h);
    cache->out_conv_input = std::move(a);
    cache->out_conv_output = std::move(oc);
    cache->pooled_input = std::move(a_out);
    cache->head_input = std::move(head_in);
    cache->probability = prob;
  }
  return prob;
}

template <typename T>
BasicTensor<T> Discriminator<T>::backward(const DiscriminatorCache<T>& cache,
                                          const BasicTensor<T>& grad_out,
                                          Discriminator& grads) const {
  if (cache.blocks.size() != blocks.size() || grads.blocks.size() != blocks.size())
    throw ContractError("discriminator backward: cache or gradient buffer has the wrong depth");
  require_same_shape(grad_out.shape(), cache.probability.shape(), "discriminator backward");
  const double slope = config_.leaky_slope;
  const T inv_sqrt2 = static_cast<T>(1.0 / std::sqrt(2.0));
  const AvgPool2d pool;
  const std::size_t b = grad_out.dim(0);

  BasicTensor<T> g_logit(grad_out.shape());
  for (std::size_t i = 0; i < b; ++i) {
    const T p = cache.probability[i];
    g_logit[i] = grad_out[i] * p * (T{1} - p);
  }
  BasicTensor<T> g = head.backward(cache.head_input, std::move(g_logit).reshaped({b, 1, 1, 1}),
                                   grads.head);
  const std::size_t c = g.dim(3);
  g = global_avg_pool_backward(cache.pooled_input.shape(), std::move(g).reshaped({b, c}));
  g = leaky_relu_backward(cache.out_conv_output, g, slope);
  g = output_conv.backward(cache.out_conv_input, g, grads.output_conv);
  g = leaky_relu_backward(cache.last_block_output, g, slope);

  for (std::size_t i = blocks.size(); i-- > 0;) {
    const auto& blk = blocks[i];
    auto& gb = grads.blocks[i];
    const auto& bc = cache.blocks[i];
    g *= inv_sqrt2;
    // residual branch
    BasicTensor<T> gr = blk.conv2.backward(bc.conv2_input, g, gb.conv2);
    gr = leaky_relu_backward(bc.pooled, gr, slope);
    gr = pool.backward(bc.conv1_output.shape(), gr);
    gr = blk.conv1.backward(bc.conv1_input, gr, gb.conv1);
    gr = leaky_relu_backward(bc.input, gr, slope);
    // shortcut branch
    BasicTensor<T> gs = pool.backward(bc.shortcut_output.shape(), g);
    if (blk.learned_shortcut) gs = blk.shortcut.backward(bc.input, gs, gb.shortcut);
    gr += gs;
    g = std::move(gr);
  }
  g = input_conv.backward(cache.image, g, grads.input_conv);
  return std::move(g).reshaped({b, cache.image.dim(1), config_.mel_bins});
}

template class Discriminator<float>;
template class Discriminator<double>;

}  // namespace dygan
