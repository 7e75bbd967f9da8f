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

#include "dygan/training/losses.hpp"

#include <cmath>

namespace dygan {

ReconNorm parse_recon_norm(const std::string& s) {
  if (s == "l1") return ReconNorm::l1;
  if (s == "l2") return ReconNorm::l2;
  throw ConfigError("recon_norm must be \"l1\" or \"l2\", got \"" + s + "\"");
}

const char* to_string(ReconNorm n) { return n == ReconNorm::l1 ? "l1" : "l2"; }

void LossWeights::validate() const {
  if (!(lambda_recon >= 0.0) || !std::isfinite(lambda_recon))
    throw ConfigError("lambda_recon must be finite and >= 0");
}

template <typename T>
double loss_recon(const BasicTensor<T>& x, const BasicTensor<T>& x_hat, ReconNorm norm) {
  require_same_shape(x.shape(), x_hat.shape(), "loss_recon");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const double d = static_cast<double>(x[i]) - static_cast<double>(x_hat[i]);
    sum += norm == ReconNorm::l1 ? std::abs(d) : d * d;
  }
  return sum / static_cast<double>(x.numel());
}

template <typename T>
BasicTensor<T> loss_recon_grad(const BasicTensor<T>& x, const BasicTensor<T>& x_hat,
                               ReconNorm norm) {
  require_same_shape(x.shape(), x_hat.shape(), "loss_recon_grad");
  const double n = static_cast<double>(x.numel());
  BasicTensor<T> g(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const double d = static_cast<double>(x_hat[i]) - static_cast<double>(x[i]);
    const double v = norm == ReconNorm::l1 ? (d > 0 ? 1.0 : d < 0 ? -1.0 : 0.0) / n : 2.0 * d / n;
    g[i] = static_cast<T>(v);
  }
  return g;
}

template <typename T>
double loss_adv_g(const BasicTensor<T>& d_fake) {
  double sum = 0.0;
  for (auto v : d_fake.values()) sum += (1.0 - v) * (1.0 - v);
  return sum / static_cast<double>(d_fake.numel());
}

template <typename T>
BasicTensor<T> loss_adv_g_grad(const BasicTensor<T>& d_fake) {
  const double n = static_cast<double>(d_fake.numel());
  BasicTensor<T> g(d_fake.shape());
  for (std::size_t i = 0; i < g.numel(); ++i)
    g[i] = static_cast<T>(-2.0 * (1.0 - static_cast<double>(d_fake[i])) / n);
  return g;
}

template <typename T>
double loss_adv_d(const BasicTensor<T>& d_real, const BasicTensor<T>& d_fake) {
  double real = 0.0, fake = 0.0;
  for (auto v : d_real.values()) real += (1.0 - v) * (1.0 - v);
  for (auto v : d_fake.values()) fake += static_cast<double>(v) * v;
  return real / static_cast<double>(d_real.numel()) + fake / static_cast<double>(d_fake.numel());
}

template <typename T>
AdvDGrads<T> loss_adv_d_grad(const BasicTensor<T>& d_real, const BasicTensor<T>& d_fake) {
  AdvDGrads<T> g{BasicTensor<T>(d_real.shape()), BasicTensor<T>(d_fake.shape())};
  const double nr = static_cast<double>(d_real.numel()), nf = static_cast<double>(d_fake.numel());
  for (std::size_t i = 0; i < d_real.numel(); ++i)
    g.real[i] = static_cast<T>(-2.0 * (1.0 - static_cast<double>(d_real[i])) / nr);
  for (std::size_t i = 0; i < d_fake.numel(); ++i)
    g.fake[i] = static_cast<T>(2.0 * static_cast<double>(d_fake[i]) / nf);
  return g;
}

TotalLosses total_losses(double recon, double adv_g, double adv_d, const LossWeights& weights) {
  weights.validate();
  return {weights.lambda_recon * recon + adv_g, adv_d};
}

#define DYGAN_INSTANTIATE(T)                                                                  \
  template double loss_recon<T>(const BasicTensor<T>&, const BasicTensor<T>&, ReconNorm);    \
  template BasicTensor<T> loss_recon_grad<T>(const BasicTensor<T>&, const BasicTensor<T>&,   \
                                             ReconNorm);                                     \
  template double loss_adv_g<T>(const BasicTensor<T>&);                                      \
  template BasicTensor<T> loss_adv_g_grad<T>(const BasicTensor<T>&);                         \
  template double loss_adv_d<T>(const BasicTensor<T>&, const BasicTensor<T>&);               \
  template AdvDGrads<T> loss_adv_d_grad<T>(const BasicTensor<T>&, const BasicTensor<T>&);

DYGAN_INSTANTIATE(float)
DYGAN_INSTANTIATE(double)

#undef DYGAN_INSTANTIATE

}  // namespace dygan
