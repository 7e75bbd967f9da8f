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

#include "dygan/layers/conv.hpp"
#include "dygan/layers/norm.hpp"

namespace dygan {

template <typename T>
struct WadaINCache {
  BasicTensor<T> input;    // x              [b, t, c_in]
  BasicTensor<T> speaker;  // s              [b, d_s]
  BasicTensor<T> gamma;    // s Wg + bg      [b, c_in]
  BasicTensor<T> scaled;   // gamma * x      [b, t, c_in]
};

/// Speaker-modulated 1d convolution. The kernel's input-channel axis is
/// scaled by gamma = s Wg + bg, one gamma per batch element:
///
///   W'[q, p, r] = gamma[p] * W[q, p, r]
///
/// Convolving x with W' equals convolving (gamma * x) with W, which is how the
/// forward pass evaluates it; no per-batch kernel is materialized. bg starts
/// at 1, so an untrained layer is the plain convolution.
template <typename T>
struct WadaINConv {
  Conv1d<T> conv;                // W [k_w, c_in, c_out] and bias [c_out]
  BasicTensor<T> gamma_weight;   // [d_s, c_in]
  BasicTensor<T> gamma_bias;     // [c_in]

  WadaINConv() = default;
  WadaINConv(std::size_t c_in, std::size_t c_out, std::size_t width, std::size_t spk_dim);
  static WadaINConv init(std::size_t c_in, std::size_t c_out, std::size_t width,
                         std::size_t spk_dim, Rng& rng);

  std::size_t spk_dim() const { return gamma_weight.dim(0); }

  BasicTensor<T> gamma(const BasicTensor<T>& s) const;
  BasicTensor<T> forward(const BasicTensor<T>& x, const BasicTensor<T>& s,
                         WadaINCache<T>* cache = nullptr) const;

  struct InputGrads {
    BasicTensor<T> x;
    BasicTensor<T> s;
  };
  InputGrads backward(const WadaINCache<T>& cache, const BasicTensor<T>& grad_out,
                      WadaINConv& grads) const;

  WadaINConv zeros_like() const;
  static std::size_t param_count(std::size_t c_in, std::size_t c_out, std::size_t width,
                                 std::size_t spk_dim) {
    return Conv1d<T>::param_count(c_in, c_out, width) + spk_dim * c_in + c_in;
  }

  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) {
    conv.for_each_param(prefix, f);
    f(param_name(prefix, "gamma_weight"), gamma_weight);
    f(param_name(prefix, "gamma_bias"), gamma_bias);
  }
  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) const {
    conv.for_each_param(prefix, f);
    f(param_name(prefix, "gamma_weight"), gamma_weight);
    f(param_name(prefix, "gamma_bias"), gamma_bias);
  }
};

}  // namespace dygan
