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

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dygan/tensor.hpp"

namespace dygan::gradcheck {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultStep = 1e-5;
inline constexpr double kDefaultTolerance = 1e-4;

// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every element.
// Throws OracleError when f returns a non-finite value.
TensorD fd_gradient(const std::function<double(const TensorD&)>& f, const TensorD& x,
                    double step = kDefaultStep);

// |a - b| / max(|a|, |b|, 1e-8)
double relative_error(double a, double b);

enum class LayerKind {
  lconv,
  dynconv,
  dynconv_softmax,
  adain,
  wadain_conv,
  conv1d,
  conv2d,
  conv2d_strided,
  avgpool2d,
  layer_norm,
  glu,
  loss_recon,
  loss_adv_g,
  loss_adv_d,
  generator,
  discriminator,
};

std::vector<LayerKind> all_layer_kinds();
std::string to_string(LayerKind kind);
LayerKind parse_layer_kind(const std::string& name);

// Extents used to build each checked instance. Kinds read only what they need.
struct ShapeSpec {
  std::size_t batch = 2;
  std::size_t time = 6;
  std::size_t channels = 4;
  std::size_t heads = 2;
  std::size_t kernel = 3;
  std::size_t spk_dim = 3;
  std::size_t out_channels = 3;
  std::size_t height = 5;
  std::size_t width = 6;
};

struct GradCheckOptions {
  double step = kDefaultStep;
  double tolerance = kDefaultTolerance;
  // Negative control: negate every analytic gradient before comparing.
  bool flip_sign = false;
};

struct TensorError {
  std::string name;
  bool is_input = false;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::uint64_t worst_seed = 0;
};

struct GradCheckReport {
  std::string layer;
  std::vector<std::uint64_t> seeds;
  std::vector<TensorError> params;
  std::vector<TensorError> inputs;
  double step = kDefaultStep;
  double tolerance = kDefaultTolerance;
  bool pass = false;
  std::string failure;  // set when an analytic gradient was non-finite

  double max_error() const;
};

GradCheckReport check_layer(LayerKind kind, const ShapeSpec& shape,
                            std::span<const std::uint64_t> seeds,
                            const GradCheckOptions& options = {});

// One report per kind, each over `seeds`.
std::vector<GradCheckReport> check_all(std::span<const std::uint64_t> seeds,
                                       const GradCheckOptions& options = {});

nlohmann::json to_json(const GradCheckReport& report);

}  // namespace dygan::gradcheck
