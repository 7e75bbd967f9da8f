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

#include <string>

#include "dygan/tensor.hpp"

namespace dygan {

// How the reconstruction norm is read: mean absolute (l1) or mean squared (l2)
// error over all elements.
enum class ReconNorm { l1, l2 };

ReconNorm parse_recon_norm(const std::string& s);
const char* to_string(ReconNorm n);

struct LossWeights {
  double lambda_recon = 5.0;
  void validate() const;
};

template <typename T>
double loss_recon(const BasicTensor<T>& x, const BasicTensor<T>& x_hat,
                  ReconNorm norm = ReconNorm::l1);
// d loss_recon / d x_hat. For l1, ties (x == x_hat) take the zero subgradient.
template <typename T>
BasicTensor<T> loss_recon_grad(const BasicTensor<T>& x, const BasicTensor<T>& x_hat,
                               ReconNorm norm = ReconNorm::l1);

// Least-squares generator loss: mean (1 - D(G(z, s)))^2.
template <typename T>
double loss_adv_g(const BasicTensor<T>& d_fake);
template <typename T>
BasicTensor<T> loss_adv_g_grad(const BasicTensor<T>& d_fake);

// Least-squares discriminator loss: mean (1 - D(x))^2 + mean D(G(z, s))^2.
template <typename T>
double loss_adv_d(const BasicTensor<T>& d_real, const BasicTensor<T>& d_fake);
template <typename T>
struct AdvDGrads {
  BasicTensor<T> real;
  BasicTensor<T> fake;
};
template <typename T>
AdvDGrads<T> loss_adv_d_grad(const BasicTensor<T>& d_real, const BasicTensor<T>& d_fake);

struct TotalLosses {
  double generator = 0.0;      // lambda * L_recon + L_adv_G
  double discriminator = 0.0;  // L_adv_D
};

TotalLosses total_losses(double recon, double adv_g, double adv_d, const LossWeights& weights);

}  // namespace dygan
