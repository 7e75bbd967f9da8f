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

#include "dygan/layers/norm.hpp"

#include <algorithm>
#include <cmath>

#include "dygan/kernels.hpp"

namespace dygan {

template <typename T>
LayerNorm<T>::LayerNorm(std::size_t channels) : gain({channels}, T{1}), bias({channels}) {}

template <typename T>
LayerNorm<T> LayerNorm<T>::zeros_like() const {
  LayerNorm g;
  g.gain = gain.zeros_like();
  g.bias = bias.zeros_like();
  g.eps = eps;
  return g;
}

template <typename T>
BasicTensor<T> project_speaker(const BasicTensor<T>& s, const BasicTensor<T>& weight,
                               const BasicTensor<T>& bias) {
  require_rank(s.shape(), 2, "speaker embedding");
  if (s.dim(1) != weight.dim(0))
    throw DimensionError("speaker embedding " + shape_str(s.shape()) + " vs projection " +
                         shape_str(weight.shape()));
  const std::size_t b = s.dim(0), d = s.dim(1), c = weight.dim(1);
  BasicTensor<T> out({b, c});
  for (std::size_t i = 0; i < b; ++i) std::copy_n(bias.data(), c, out.data() + i * c);
  kernels::gemm_nn(b, d, c, s.data(), d, weight.data(), c, out.data(), c);
  return out;
}

template <typename T>
AdaIN<T>::AdaIN(std::size_t spk_dim, std::size_t channels)
    : gamma_weight({spk_dim, channels}),
      gamma_bias({channels}, T{1}),
      beta_weight({spk_dim, channels}),
      beta_bias({channels}) {}

template <typename T>
AdaIN<T> AdaIN<T>::init(std::size_t spk_dim, std::size_t channels, Rng& rng) {
  AdaIN layer(spk_dim, channels);
  layer.gamma_weight = init_weight<T>({spk_dim, channels}, spk_dim, rng);
  layer.beta_weight = init_weight<T>({spk_dim, channels}, spk_dim, rng);
  return layer;
}

template <typename T>
AdaIN<T> AdaIN<T>::zeros_like() const {
  AdaIN g;
  g.gamma_weight = gamma_weight.zeros_like();
  g.gamma_bias = gamma_bias.zeros_like();
  g.beta_weight = beta_weight.zeros_like();
  g.beta_bias = beta_bias.zeros_like();
  g.eps = eps;
  return g;
}

template <typename T>
BasicTensor<T> AdaIN<T>::forward(const BasicTensor<T>& x, const BasicTensor<T>& s,
                                 AdaINCache<T>* cache) const {
  require_rank(x.shape(), 3, "AdaIN input");
  const std::size_t b = x.dim(0), t = x.dim(1), c = x.dim(2);
  if (c != channels())
    throw DimensionError("AdaIN: input " + shape_str(x.shape()) + " vs channels " +
                         std::to_string(channels()));
  require_same_shape(s.shape(), {b, spk_dim()}, "AdaIN speaker embedding");

  BasicTensor<T> gamma = project_speaker(s, gamma_weight, gamma_bias);
  BasicTensor<T> beta = project_speaker(s, beta_weight, beta_bias);
  BasicTensor<T> normalized(x.shape());
  BasicTensor<T> inv_std({b, c});
  BasicTensor<T> out(x.shape());
  std::vector<T> mean(c), var(c);
  for (std::size_t i = 0; i < b; ++i) {
    std::fill(mean.begin(), mean.end(), T{0});
    std::fill(var.begin(), var.end(), T{0});
    const T* xb = x.data() + i * t * c;
    for (std::size_t j = 0; j < t; ++j)
      for (std::size_t p = 0; p < c; ++p) mean[p] += xb[j * c + p];
    for (std::size_t p = 0; p < c; ++p) mean[p] /= static_cast<T>(t);
    for (std::size_t j = 0; j < t; ++j)
      for (std::size_t p = 0; p < c; ++p) {
        const T d = xb[j * c + p] - mean[p];
        var[p] += d * d;
      }
    for (std::size_t p = 0; p < c; ++p)
      inv_std[i * c + p] = T{1} / std::sqrt(var[p] / static_cast<T>(t) + static_cast<T>(eps));
    for (std::size_t j = 0; j < t; ++j)
      for (std::size_t p = 0; p < c; ++p) {
        const std::size_t at = (i * t + j) * c + p;
        const T xh = (x[at] - mean[p]) * inv_std[i * c + p];
        normalized[at] = xh;
        out[at] = gamma[i * c + p] * xh + beta[i * c + p];
      }
  }
  if (cache) {
    cache->speaker = s;
    cache->normalized = std::move(normalized);
    cache->gamma = std::move(gamma);
    cache->inv_std = std::move(inv_std);
  }
  return out;
}

template <typename T>
typename AdaIN<T>::InputGrads AdaIN<T>::backward(const AdaINCache<T>& cache,
                                                 const BasicTensor<T>& grad_out,
                                                 AdaIN& grads) const {
  require_same_shape(grad_out.shape(), cache.normalized.shape(), "AdaIN backward");
  const std::size_t b = grad_out.dim(0), t = grad_out.dim(1), c = grad_out.dim(2);
  const std::size_t d = spk_dim();
  if (cache.gamma.shape() != Shape{b, c}) throw ContractError("AdaIN backward: stale cache");

  BasicTensor<T> grad_gamma({b, c}), grad_beta({b, c});
  BasicTensor<T> grad_x(grad_out.shape());
  std::vector<T> mean_d(c), mean_dx(c);
  for (std::size_t i = 0; i < b; ++i) {
    std::fill(mean_d.begin(), mean_d.end(), T{0});
    std::fill(mean_dx.begin(), mean_dx.end(), T{0});
    for (std::size_t j = 0; j < t; ++j)
      for (std::size_t p = 0; p < c; ++p) {
        const std::size_t at = (i * t + j) * c + p;
        const T g = grad_out[at];
        const T xh = cache.normalized[at];
        grad_gamma[i * c + p] += g * xh;
        grad_beta[i * c + p] += g;
        const T dxh = g * cache.gamma[i * c + p];
        mean_d[p] += dxh;
        mean_dx[p] += dxh * xh;
      }
    for (std::size_t p = 0; p < c; ++p) {
      mean_d[p] /= static_cast<T>(t);
      mean_dx[p] /= static_cast<T>(t);
    }
    for (std::size_t j = 0; j < t; ++j)
      for (std::size_t p = 0; p < c; ++p) {
        const std::size_t at = (i * t + j) * c + p;
        const T dxh = grad_out[at] * cache.gamma[i * c + p];
        grad_x[at] = cache.inv_std[i * c + p] *
                     (dxh - mean_d[p] - cache.normalized[at] * mean_dx[p]);
      }
  }

  const BasicTensor<T>& s = cache.speaker;
  kernels::gemm_tn(b, d, c, s.data(), d, grad_gamma.data(), c, grads.gamma_weight.data(), c);
  kernels::gemm_tn(b, d, c, s.data(), d, grad_beta.data(), c, grads.beta_weight.data(), c);
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t p = 0; p < c; ++p) {
      grads.gamma_bias[p] += grad_gamma[i * c + p];
      grads.beta_bias[p] += grad_beta[i * c + p];
    }
  BasicTensor<T> grad_s({b, d});
  kernels::gemm_nt(b, c, d, grad_gamma.data(), c, gamma_weight.data(), c, grad_s.data(), d);
  kernels::gemm_nt(b, c, d, grad_beta.data(), c, beta_weight.data(), c, grad_s.data(), d);
  return {std::move(grad_x), std::move(grad_s)};
}

template struct LayerNorm<float>;
template struct LayerNorm<double>;
template struct AdaIN<float>;
template struct AdaIN<double>;
template BasicTensor<float> project_speaker<float>(const BasicTensor<float>&,
                                                   const BasicTensor<float>&,
                                                   const BasicTensor<float>&);
template BasicTensor<double> project_speaker<double>(const BasicTensor<double>&,
                                                     const BasicTensor<double>&,
                                                     const BasicTensor<double>&);

}  // namespace dygan
