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

#include <cmath>
#include <limits>

#include "doctest.h"

#include "dygan/gradcheck/gradcheck.hpp"
#include "dygan/layers/lconv.hpp"

using namespace dygan;
using namespace dygan::gradcheck;

TEST_SUITE("gradcheck") {

TEST_CASE("central differences on a quadratic") {
  Rng rng(1);
  const TensorD x = TensorD::randn({7}, rng);
  const TensorD g = fd_gradient(
      [](const TensorD& v) {
        double s = 0.0;
        for (double e : v.values()) s += e * e;
        return s;
      },
      x);
  for (std::size_t i = 0; i < 7; ++i) CHECK(g[i] == doctest::Approx(2.0 * x[i]).epsilon(1e-8));
}

TEST_CASE("non-finite evaluations are reported") {
  const auto f = [](const TensorD& v) {
    return v[0] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  CHECK_THROWS_AS(fd_gradient(f, TensorD({1})), OracleError);
}

TEST_CASE("relative error") {
  CHECK(relative_error(1.0, 1.0) == 0.0);
  CHECK(relative_error(2.0, 1.0) == 0.5);
  CHECK(relative_error(0.0, 0.0) == 0.0);
  CHECK(relative_error(1e-12, 0.0) == doctest::Approx(1e-4));
}

TEST_CASE("lconv gradient is exact up to round-off") {
  Rng rng(2);
  const auto layer = LconvLayer<double>::identity(3, 2);
  const TensorD x = TensorD::randn({1, 5, 4}, rng);
  const TensorD r = TensorD::randn({1, 5, 4}, rng);
  auto grads = layer.zeros_like();
  const TensorD analytic = layer.backward(x, r, grads);
  const TensorD numeric = fd_gradient(
      [&](const TensorD& v) {
        const TensorD y = layer.forward(v);
        double s = 0.0;
        for (std::size_t i = 0; i < y.numel(); ++i) s += y[i] * r[i];
        return s;
      },
      x);
  CHECK(max_abs_diff(analytic, numeric) < 1e-9);
  CHECK(analytic == r);
}

TEST_CASE("every layer kind passes on five seeds") {
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  for (const auto& r : check_all(seeds)) {
    INFO(r.layer << " max error " << r.max_error());
    CHECK(r.pass);
    CHECK(r.seeds.size() == 5);
    CHECK(r.max_error() < kDefaultTolerance);
    CHECK(!r.inputs.empty());
  }
}

TEST_CASE("negative control: flipped gradients fail") {
  const std::vector<std::uint64_t> seeds{1};
  for (const auto& r : check_all(seeds, {.flip_sign = true})) {
    INFO(r.layer);
    CHECK(!r.pass);
  }
}

TEST_CASE("an unreachable tolerance fails") {
  const std::vector<std::uint64_t> seeds{1};
  CHECK(!check_layer(LayerKind::generator, {}, seeds, {.tolerance = 1e-12}).pass);
}

TEST_CASE("reports name parameters and inputs") {
  const std::vector<std::uint64_t> seeds{3};
  const auto r = check_layer(LayerKind::dynconv, {}, seeds);
  std::vector<std::string> names;
  for (const auto& e : r.params) names.push_back(e.name);
  CHECK(names == std::vector<std::string>{"dynconv.W1", "dynconv.b1", "dynconv.W2", "dynconv.b2"});
  REQUIRE(r.inputs.size() == 1);
  CHECK(r.inputs[0].name == "x");
  const auto j = to_json(r);
  CHECK(j["layer"] == "dynconv");
  CHECK(j["pass"] == true);
  CHECK(j["params"].size() == 4);
}

TEST_CASE("kind names round trip") {
  for (const auto k : all_layer_kinds()) CHECK(parse_layer_kind(to_string(k)) == k);
  CHECK(all_layer_kinds().size() == 16);
  CHECK_THROWS(parse_layer_kind("attention"));
}

}  // TEST_SUITE
