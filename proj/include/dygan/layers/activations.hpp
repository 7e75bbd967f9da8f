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

#include "dygan/tensor.hpp"

namespace dygan {

inline constexpr double kLeakySlope = 0.2;

template <typename T>
BasicTensor<T> leaky_relu(const BasicTensor<T>& x, double slope = kLeakySlope);
template <typename T>
BasicTensor<T> leaky_relu_backward(const BasicTensor<T>& x, const BasicTensor<T>& grad_out,
                                   double slope = kLeakySlope);

template <typename T>
BasicTensor<T> sigmoid(const BasicTensor<T>& x);

// [b, h, w, c] -> [b, c]
template <typename T>
BasicTensor<T> global_avg_pool(const BasicTensor<T>& x);
template <typename T>
BasicTensor<T> global_avg_pool_backward(const Shape& input_shape, const BasicTensor<T>& grad_out);

}  // namespace dygan
