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

#include "dygan/layers/activations.hpp"

#include <cmath>

#include "dygan/layers/common.hpp"

namespace dygan {

template <typename T>
BasicTensor<T> init_weight(Shape shape, std::size_t fan_in, Rng& rng) {
  return BasicTensor<T>::randn(std::move(shape), rng, 1.0 / std::sqrt(static_cast<double>(fan_in)));
}

template <typename T>
BasicTensor<T> leaky_relu(const BasicTensor<T>& x, double slope) {
  BasicTensor<T> out(x.shape());
  const T s = static_cast<T>(slope);
  for (std::size_t i = 0; i < x.numel(); ++i) out[i] = x[i] > T{0} ? x[i] : s * x[i];
  return out;
}

template <typename T>
BasicTensor<T> leaky_relu_backward(const BasicTensor<T>& x, const BasicTensor<T>& grad_out,
                                   double slope) {
  require_same_shape(x.shape(), grad_out.shape(), "leaky_relu_backward");
  BasicTensor<T> grad(x.shape());
  const T s = static_cast<T>(slope);
  for (std::size_t i = 0; i < x.numel(); ++i) grad[i] = x[i] > T{0} ? grad_out[i] : s * grad_out[i];
  return grad;
}

template <typename T>
BasicTensor<T> sigmoid(const BasicTensor<T>& x) {
  BasicTensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) out[i] = sigmoid(x[i]);
  return out;
}

template <typename T>
BasicTensor<T> global_avg_pool(const BasicTensor<T>& x) {
  require_rank(x.shape(), 4, "global_avg_pool");
  const std::size_t b = x.dim(0), area = x.dim(1) * x.dim(2), c = x.dim(3);
  BasicTensor<T> out({b, c});
  for (std::size_t i = 0; i < b; ++i) {
    T* o = out.data() + i * c;
    for (std::size_t s = 0; s < area; ++s) {
      const T* in = x.data() + (i * area + s) * c;
      for (std::size_t p = 0; p < c; ++p) o[p] += in[p];
    }
    for (std::size_t p = 0; p < c; ++p) o[p] /= static_cast<T>(area);
  }
  return out;
}

template <typename T>
BasicTensor<T> global_avg_pool_backward(const Shape& input_shape, const BasicTensor<T>& grad_out) {
  require_rank(input_shape, 4, "global_avg_pool_backward");
  const std::size_t b = input_shape[0], area = input_shape[1] * input_shape[2], c = input_shape[3];
  require_same_shape(grad_out.shape(), {b, c}, "global_avg_pool_backward");
  BasicTensor<T> grad(input_shape);
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t s = 0; s < area; ++s)
      for (std::size_t p = 0; p < c; ++p)
        grad[(i * area + s) * c + p] = grad_out[i * c + p] / static_cast<T>(area);
  return grad;
}

#define DYGAN_INSTANTIATE(T)                                                                 \
  template BasicTensor<T> init_weight<T>(Shape, std::size_t, Rng&);                         \
  template BasicTensor<T> leaky_relu<T>(const BasicTensor<T>&, double);                     \
  template BasicTensor<T> leaky_relu_backward<T>(const BasicTensor<T>&, const BasicTensor<T>&, \
                                                 double);                                   \
  template BasicTensor<T> sigmoid<T>(const BasicTensor<T>&);                                \
  template BasicTensor<T> global_avg_pool<T>(const BasicTensor<T>&);                        \
  template BasicTensor<T> global_avg_pool_backward<T>(const Shape&, const BasicTensor<T>&);

DYGAN_INSTANTIATE(float)
DYGAN_INSTANTIATE(double)

#undef DYGAN_INSTANTIATE

}  // namespace dygan
