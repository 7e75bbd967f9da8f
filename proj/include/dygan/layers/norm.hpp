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
#include <string_view>

#include "dygan/layers/common.hpp"
#include "dygan/tensor.hpp"

namespace dygan {

/// Per-position normalization across channels with a learned gain and bias.
template <typename T>
struct LayerNorm {
  BasicTensor<T> gain;  // [c], starts at 1
  BasicTensor<T> bias;  // [c], starts at 0
  double eps = kLayerNormEps;

  LayerNorm() = default;
  explicit LayerNorm(std::size_t channels);

  BasicTensor<T> forward(const BasicTensor<T>& x, LayerNormCache<T>* cache = nullptr) const {
    return layer_norm(x, gain, bias, eps, cache);
  }
  BasicTensor<T> backward(const LayerNormCache<T>& cache, const BasicTensor<T>& grad_out,
                          LayerNorm& grads) const {
    return layer_norm_backward(cache, gain, grad_out, grads.gain, grads.bias);
  }

  LayerNorm zeros_like() const;
  static std::size_t param_count(std::size_t c) { return 2 * c; }

  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) {
    f(param_name(prefix, "gain"), gain);
    f(param_name(prefix, "bias"), bias);
  }
  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) const {
    f(param_name(prefix, "gain"), gain);
    f(param_name(prefix, "bias"), bias);
  }
};

template <typename T>
struct AdaINCache {
  BasicTensor<T> speaker;     // s      [b, d_s]
  BasicTensor<T> normalized;  // x_hat  [b, t, c]
  BasicTensor<T> gamma;       // [b, c]
  BasicTensor<T> inv_std;     // [b, c]
};

/// Adaptive instance normalization. Each (batch, channel) series is
/// normalized over time, then scaled and shifted by gamma and beta projected
/// from the speaker embedding:
///
///   gamma = s Wg + bg,  beta = s Wb + bb
///   out   = gamma * (x - mean_t) / sqrt(var_t + eps) + beta
///
/// bg starts at 1 and bb at 0, so a fresh layer with s = 0 is plain instance
/// normalization.
template <typename T>
struct AdaIN {
  BasicTensor<T> gamma_weight;  // [d_s, c]
  BasicTensor<T> gamma_bias;    // [c]
  BasicTensor<T> beta_weight;   // [d_s, c]
  BasicTensor<T> beta_bias;     // [c]
  double eps = 1e-5;

  AdaIN() = default;
  AdaIN(std::size_t spk_dim, std::size_t channels);
  static AdaIN init(std::size_t spk_dim, std::size_t channels, Rng& rng);

  std::size_t spk_dim() const { return gamma_weight.dim(0); }
  std::size_t channels() const { return gamma_weight.dim(1); }

  BasicTensor<T> forward(const BasicTensor<T>& x, const BasicTensor<T>& s,
                         AdaINCache<T>* cache = nullptr) const;

  struct InputGrads {
    BasicTensor<T> x;
    BasicTensor<T> s;
  };
  InputGrads backward(const AdaINCache<T>& cache, const BasicTensor<T>& grad_out,
                      AdaIN& grads) const;

  AdaIN zeros_like() const;
  static std::size_t param_count(std::size_t spk_dim, std::size_t c) {
    return 2 * (spk_dim * c + c);
  }

  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) {
    f(param_name(prefix, "gamma_weight"), gamma_weight);
    f(param_name(prefix, "gamma_bias"), gamma_bias);
    f(param_name(prefix, "beta_weight"), beta_weight);
    f(param_name(prefix, "beta_bias"), beta_bias);
  }
  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) const {
    f(param_name(prefix, "gamma_weight"), gamma_weight);
    f(param_name(prefix, "gamma_bias"), gamma_bias);
    f(param_name(prefix, "beta_weight"), beta_weight);
    f(param_name(prefix, "beta_bias"), beta_bias);
  }
};

// Affine projection of speaker embeddings: [b, d_s] x [d_s, c] + [c] -> [b, c].
template <typename T>
BasicTensor<T> project_speaker(const BasicTensor<T>& s, const BasicTensor<T>& weight,
                               const BasicTensor<T>& bias);

}  // namespace dygan
