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

#include "dygan/model/generator.hpp"

namespace dygan {

void GeneratorConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string("generator.") + name + " must be >= 1");
  };
  positive(in_dim, "in_dim");
  positive(hidden, "hidden");
  positive(out_dim, "out_dim");
  positive(n_blocks, "n_blocks");
  positive(k, "k");
  positive(h, "h");
  positive(spk_dim, "spk_dim");
  positive(conv_kernel, "conv_kernel");
  if (hidden % h != 0)
    throw ConfigError("generator.h (" + std::to_string(h) + ") must divide generator.hidden (" +
                      std::to_string(hidden) + ")");
  if (k % 2 == 0) throw ConfigError("generator.k must be odd");
  if (conv_kernel % 2 == 0) throw ConfigError("generator.conv_kernel must be odd");
}

template <typename T>
Generator<T>::Generator(const GeneratorConfig& config) : config_(config) {
  config.validate();
  const std::size_t c = config.hidden;
  input_conv = Conv1d<T>(config.in_dim, c, config.conv_kernel);
  blocks.resize(config.n_blocks);
  for (auto& b : blocks) {
    b.norm1 = LayerNorm<T>(c);
    b.dynconv = DynConvLayer<T>(c, config.k, config.h, config.softmax_kernel);
    b.norm2 = LayerNorm<T>(c);
    b.conv = Conv1d<T>(c, c, config.conv_kernel);
    b.wadain = WadaINConv<T>(c, c, config.conv_kernel, config.spk_dim);
  }
  output_conv = Conv1d<T>(c, config.out_dim, 1);
}

template <typename T>
Generator<T> Generator<T>::init(const GeneratorConfig& config, std::uint64_t seed) {
  Generator g(config);
  const std::size_t c = config.hidden;
  Rng rng(seed);
  g.input_conv = Conv1d<T>::init(config.in_dim, c, config.conv_kernel, rng);
  for (auto& b : g.blocks) {
    b.dynconv = DynConvLayer<T>::init(c, config.k, config.h, rng, config.softmax_kernel);
    b.conv = Conv1d<T>::init(c, c, config.conv_kernel, rng);
    b.wadain = WadaINConv<T>::init(c, c, config.conv_kernel, config.spk_dim, rng);
  }
  g.output_conv = Conv1d<T>::init(c, config.out_dim, 1, rng);
  return g;
}

template <typename T>
Generator<T> Generator<T>::zeros_like() const {
  Generator g = *this;
  g.for_each_param([](const std::string&, BasicTensor<T>& p) { p.set_zero(); });
  return g;
}

template <typename T>
BasicTensor<T> Generator<T>::forward(const BasicTensor<T>& z, const BasicTensor<T>& s,
                                     GeneratorCache<T>* cache) const {
  require_rank(z.shape(), 3, "generator content features");
  if (z.dim(2) != config_.in_dim)
    throw DimensionError("generator: content features " + shape_str(z.shape()) +
                         " do not match in_dim " + std::to_string(config_.in_dim));
  require_same_shape(s.shape(), {z.dim(0), config_.spk_dim}, "generator speaker embedding");

  if (cache) {
    cache->z = z;
    cache->blocks.assign(blocks.size(), {});
  }
  BasicTensor<T> h = input_conv.forward(z);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& blk = blocks[i];
    GeneratorBlockCache<T>* bc = cache ? &cache->blocks[i] : nullptr;
    if (bc) bc->input = h;

    BasicTensor<T> branch = blk.dynconv.forward(blk.norm1.forward(h, bc ? &bc->norm1 : nullptr),
                                                bc ? &bc->dynconv : nullptr);
    h += branch;

    BasicTensor<T> conv_in = blk.norm2.forward(h, bc ? &bc->norm2 : nullptr);
    branch = blk.wadain.forward(blk.conv.forward(conv_in), s, bc ? &bc->wadain : nullptr);
    if (bc) bc->conv_input = std::move(conv_in);
    h += branch;
  }
  if (cache) cache->last_hidden = h;
  return output_conv.forward(h);
}

template <typename T>
typename Generator<T>::InputGrads Generator<T>::backward(const GeneratorCache<T>& cache,
                                                         const BasicTensor<T>& grad_out,
                                                         Generator& grads) const {
  if (cache.blocks.size() != blocks.size() || grads.blocks.size() != blocks.size())
    throw ContractError("generator backward: cache or gradient buffer has the wrong block count");
  BasicTensor<T> g = output_conv.backward(cache.last_hidden, grad_out, grads.output_conv);
  BasicTensor<T> grad_s({cache.z.dim(0), config_.spk_dim});

  for (std::size_t i = blocks.size(); i-- > 0;) {
    const auto& blk = blocks[i];
    auto& gb = grads.blocks[i];
    const auto& bc = cache.blocks[i];

    // h2 = h1 + wadain(conv(norm2(h1)))
    auto wg = blk.wadain.backward(bc.wadain, g, gb.wadain);
    grad_s += wg.s;
    BasicTensor<T> gn = blk.conv.backward(bc.conv_input, wg.x, gb.conv);
    g += blk.norm2.backward(bc.norm2, gn, gb.norm2);

    // h1 = h + dynconv(norm1(h))
    BasicTensor<T> gd = blk.dynconv.backward(bc.dynconv, g, gb.dynconv);
    g += blk.norm1.backward(bc.norm1, gd, gb.norm1);
  }
  BasicTensor<T> grad_z = input_conv.backward(cache.z, g, grads.input_conv);
  return {std::move(grad_z), std::move(grad_s)};
}

template class Generator<float>;
template class Generator<double>;

}  // namespace dygan
