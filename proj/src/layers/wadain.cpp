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

#include "dygan/layers/wadain.hpp"

#include "dygan/kernels.hpp"

namespace dygan {

template <typename T>
WadaINConv<T>::WadaINConv(std::size_t c_in, std::size_t c_out, std::size_t width,
                          std::size_t spk_dim)
    : conv(c_in, c_out, width), gamma_weight({spk_dim, c_in}), gamma_bias({c_in}, T{1}) {}

template <typename T>
WadaINConv<T> WadaINConv<T>::init(std::size_t c_in, std::size_t c_out, std::size_t width,
                                  std::size_t spk_dim, Rng& rng) {
  WadaINConv layer(c_in, c_out, width, spk_dim);
  layer.conv = Conv1d<T>::init(c_in, c_out, width, rng);
  layer.gamma_weight = init_weight<T>({spk_dim, c_in}, spk_dim, rng);
  return layer;
}

template <typename T>
WadaINConv<T> WadaINConv<T>::zeros_like() const {
  WadaINConv g;
  g.conv = conv.zeros_like();
  g.gamma_weight = gamma_weight.zeros_like();
  g.gamma_bias = gamma_bias.zeros_like();
  return g;
}

template <typename T>
BasicTensor<T> WadaINConv<T>::gamma(const BasicTensor<T>& s) const {
  return project_speaker(s, gamma_weight, gamma_bias);
}

template <typename T>
BasicTensor<T> WadaINConv<T>::forward(const BasicTensor<T>& x, const BasicTensor<T>& s,
                                      WadaINCache<T>* cache) const {
  require_rank(x.shape(), 3, "WadaINConv input");
  const std::size_t b = x.dim(0), t = x.dim(1), ci = conv.in_channels();
  if (x.dim(2) != ci)
    throw DimensionError("WadaINConv: input " + shape_str(x.shape()) + " vs kernel " +
                         shape_str(conv.kernel.shape()));
  require_same_shape(s.shape(), {b, spk_dim()}, "WadaINConv speaker embedding");

  BasicTensor<T> g = gamma(s);
  BasicTensor<T> scaled(x.shape());
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t j = 0; j < t; ++j)
      for (std::size_t p = 0; p < ci; ++p) {
        const std::size_t at = (i * t + j) * ci + p;
        scaled[at] = g[i * ci + p] * x[at];
      }
  BasicTensor<T> out = conv.forward(scaled);
  if (cache) {
    cache->input = x;
    cache->speaker = s;
    cache->gamma = std::move(g);
    cache->scaled = std::move(scaled);
  }
  return out;
}

template <typename T>
typename WadaINConv<T>::InputGrads WadaINConv<T>::backward(const WadaINCache<T>& cache,
                                                           const BasicTensor<T>& grad_out,
                                                           WadaINConv& grads) const {
  const BasicTensor<T>& x = cache.input;
  const std::size_t ci = conv.in_channels(), d = spk_dim();
  if (x.rank() != 3 || x.dim(2) != ci || cache.gamma.shape() != Shape{x.dim(0), ci})
    throw ContractError("WadaINConv backward: cache does not match this layer");
  const std::size_t b = x.dim(0), t = x.dim(1);

  BasicTensor<T> grad_scaled = conv.backward(cache.scaled, grad_out, grads.conv);
  BasicTensor<T> grad_x(x.shape());
  BasicTensor<T> grad_gamma({b, ci});
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t j = 0; j < t; ++j)
      for (std::size_t p = 0; p < ci; ++p) {
        const std::size_t at = (i * t + j) * ci + p;
        grad_x[at] = cache.gamma[i * ci + p] * grad_scaled[at];
        grad_gamma[i * ci + p] += grad_scaled[at] * x[at];
      }

  const BasicTensor<T>& s = cache.speaker;
  kernels::gemm_tn(b, d, ci, s.data(), d, grad_gamma.data(), ci, grads.gamma_weight.data(), ci);
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t p = 0; p < ci; ++p) grads.gamma_bias[p] += grad_gamma[i * ci + p];
  BasicTensor<T> grad_s({b, d});
  kernels::gemm_nt(b, ci, d, grad_gamma.data(), ci, gamma_weight.data(), ci, grad_s.data(), d);
  return {std::move(grad_x), std::move(grad_s)};
}

template struct WadaINConv<float>;
template struct WadaINConv<double>;

}  // namespace dygan
