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

#include <cstring>
#include <set>
#include <sstream>

#include "doctest.h"

#include "dygan/errors.hpp"
#include "dygan/model.hpp"

using namespace dygan;

namespace {

GeneratorConfig small_generator() {
  return {.in_dim = 6, .hidden = 8, .out_dim = 5, .n_blocks = 2, .k = 3, .h = 2, .spk_dim = 3};
}

DiscriminatorConfig small_discriminator() {
  return {.mel_bins = 5, .base_channels = 2, .max_channels = 4, .n_blocks = 2};
}

// Splits a checkpoint into its manifest and payload, lets `edit` change the
// manifest, and reassembles it.
std::string rewrite_manifest(const std::string& bytes,
                             const std::function<void(nlohmann::json&)>& edit) {
  std::uint64_t len = 0;
  std::memcpy(&len, bytes.data() + 8, 8);
  nlohmann::json manifest = nlohmann::json::parse(bytes.substr(16, len));
  edit(manifest);
  const std::string text = manifest.dump();
  const std::uint64_t new_len = text.size();
  std::string out = bytes.substr(0, 8);
  out.append(reinterpret_cast<const char*>(&new_len), 8);
  out += text;
  out += bytes.substr(16 + len);
  return out;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("generator maps [b,t,in] to [b,t,out]") {
  const auto g = Generator<float>::init(small_generator(), 1);
  Rng rng(2);
  for (const std::size_t t : {1u, 2u, 17u}) {
    const Tensor y = g.forward(Tensor::randn({3, t, 6}, rng), Tensor::randn({3, 3}, rng));
    CHECK(y.shape() == Shape{3, t, 5});
    CHECK(all_finite(y));
  }
  CHECK_THROWS_AS(g.forward(Tensor({1, 4, 7}), Tensor({1, 3})), DimensionError);
  CHECK_THROWS_AS(g.forward(Tensor({1, 4, 6}), Tensor({2, 3})), DimensionError);
}

TEST_CASE("generator receptive field is local") {
  // Changing frame 0 may only move outputs within the receptive field.
  GeneratorConfig cfg = small_generator();
  cfg.n_blocks = 1;
  const auto g = Generator<double>::init(cfg, 3);
  Rng rng(4);
  TensorD z = TensorD::randn({1, 20, 6}, rng);
  const TensorD s = TensorD::randn({1, 3}, rng);
  const TensorD y0 = g.forward(z, s);
  z(0, 0, 0) += 1.0;
  const TensorD y1 = g.forward(z, s);
  // input conv (3) + dynconv (3) + block conv (3) + wadain conv (3): reach of 4 frames
  for (std::size_t j = 5; j < 20; ++j)
    for (std::size_t p = 0; p < 5; ++p) CHECK(y0(0, j, p) == y1(0, j, p));
}

TEST_CASE("speaker embedding changes the output") {
  const auto g = Generator<double>::init(small_generator(), 5);
  Rng rng(6);
  const TensorD z = TensorD::randn({1, 8, 6}, rng);
  const TensorD a = g.forward(z, TensorD::randn({1, 3}, rng));
  const TensorD b = g.forward(z, TensorD::randn({1, 3}, rng));
  CHECK(max_abs_diff(a, b) > 1e-6);
}

TEST_CASE("init is reproducible per seed") {
  CHECK(Generator<float>::init(small_generator(), 7).output_conv.kernel ==
        Generator<float>::init(small_generator(), 7).output_conv.kernel);
  CHECK(!(Generator<float>::init(small_generator(), 7).output_conv.kernel ==
          Generator<float>::init(small_generator(), 8).output_conv.kernel));
}

TEST_CASE("registry names") {
  std::vector<std::string> names;
  Generator<float>(small_generator()).for_each_param(
      [&](const std::string& n, const Tensor&) { names.push_back(n); });
  CHECK(names.front() == "input_conv.kernel");
  CHECK(names.back() == "output_conv.bias");
  CHECK(std::find(names.begin(), names.end(), "blocks.1.dynconv.W1") != names.end());
  CHECK(std::find(names.begin(), names.end(), "blocks.0.wadain.gamma_weight") != names.end());
  CHECK(std::set<std::string>(names.begin(), names.end()).size() == names.size());

  names.clear();
  Discriminator<float>(small_discriminator())
      .for_each_param([&](const std::string& n, const Tensor&) { names.push_back(n); });
  CHECK(std::find(names.begin(), names.end(), "blocks.0.shortcut.kernel") != names.end());
  CHECK(std::find(names.begin(), names.end(), "blocks.1.shortcut.kernel") == names.end());
  CHECK(names.back() == "head.bias");
}

TEST_CASE("parameter counts: closed form agrees with the registry") {
  const GeneratorConfig paper;
  const ParamBreakdown g = count_params(Generator<float>(paper));
  CHECK(g.total == 3807200);
  CHECK(generator_param_count(paper) == g.total);
  const DiscriminatorConfig dpaper;
  const ParamBreakdown d = count_params(Discriminator<float>(dpaper));
  CHECK(d.total == 887329);
  CHECK(discriminator_param_count(dpaper) == d.total);
  CHECK(g.total + d.total < 10'000'000);

  bool found = false;
  for (const auto& l : g.layers)
    if (l.layer == "blocks.0.dynconv") {
      CHECK(l.count == 137752);
      found = true;
    }
  CHECK(found);

  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    GeneratorConfig c{.in_dim = 1 + rng.index(9),
                      .hidden = 4 * (1 + rng.index(4)),
                      .out_dim = 1 + rng.index(9),
                      .n_blocks = rng.index(3),
                      .k = 2 * rng.index(3) + 1,
                      .h = 4,
                      .spk_dim = 1 + rng.index(5),
                      .conv_kernel = 2 * rng.index(2) + 1};
    if (c.n_blocks == 0) c.n_blocks = 1;
    CHECK(generator_param_count(c) == count_params(Generator<float>(c)).total);
    DiscriminatorConfig dc{.mel_bins = 1 + rng.index(20),
                           .base_channels = 1 + rng.index(4),
                           .max_channels = 8,
                           .n_blocks = 1 + rng.index(4)};
    CHECK(discriminator_param_count(dc) == count_params(Discriminator<float>(dc)).total);
  }
}

TEST_CASE("config validation names the constraint") {
  GeneratorConfig c;
  c.h = 7;
  try {
    c.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("divide") != std::string::npos);
  }
  c = {};
  c.k = 4;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  DiscriminatorConfig d;
  d.max_channels = 8;
  CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("config JSON round trip and strictness") {
  GeneratorConfig c = small_generator();
  c.softmax_kernel = true;
  const nlohmann::json j = c;
  GeneratorConfig back;
  merge_json(j, back);
  CHECK(back == c);
  CHECK_THROWS_AS(merge_json(nlohmann::json{{"hiden", 3}}, back), ConfigError);
  CHECK_THROWS_AS(merge_json(nlohmann::json{{"hidden", -3}}, back), ConfigError);
  CHECK_THROWS_AS(merge_json(nlohmann::json{{"hidden", "x"}}, back), ConfigError);
  GeneratorConfig partial;
  merge_json(nlohmann::json{{"n_blocks", 2}}, partial);
  CHECK(partial.n_blocks == 2);
  CHECK(partial.hidden == GeneratorConfig{}.hidden);
}

TEST_CASE("discriminator outputs probabilities and needs min_frames") {
  const auto d = Discriminator<float>::init(small_discriminator(), 9);
  CHECK(d.config().min_frames() == 4);
  Rng rng(10);
  const Tensor p = d.forward(Tensor::randn({3, 9, 5}, rng));
  CHECK(p.shape() == Shape{3, 1});
  for (float v : p.values()) {
    CHECK(v > 0.0f);
    CHECK(v < 1.0f);
  }
  CHECK_THROWS_AS(d.forward(Tensor({1, 3, 5})), DimensionError);
  CHECK_THROWS_AS(d.forward(Tensor({1, 8, 6})), DimensionError);
  CHECK(DiscriminatorConfig{}.min_frames() == 16);
}

TEST_CASE("checkpoint round trip is bit exact") {
  const auto g = Generator<float>::init(small_generator(), 11);
  std::stringstream ss;
  write_checkpoint(ss, g);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 4) == "DYCK");
  const auto back = read_generator<float>(ss);
  CHECK(back.config() == g.config());
  bool all_equal = true;
  std::vector<const Tensor*> mine;
  g.for_each_param([&](const std::string&, const Tensor& t) { mine.push_back(&t); });
  std::size_t i = 0;
  back.for_each_param([&](const std::string&, const Tensor& t) {
    all_equal = all_equal && std::memcmp(t.data(), mine[i]->data(), t.numel() * 4) == 0;
    ++i;
  });
  CHECK(all_equal);
  Rng rng(12);
  const Tensor z = Tensor::randn({1, 6, 6}, rng), s = Tensor::randn({1, 3}, rng);
  CHECK(back.forward(z, s) == g.forward(z, s));

  // Writing again gives the same bytes.
  std::stringstream again;
  write_checkpoint(again, back);
  CHECK(again.str() == bytes);

  const auto d = Discriminator<float>::init(small_discriminator(), 13);
  std::stringstream sd;
  write_checkpoint(sd, d);
  const auto dback = read_discriminator<float>(sd);
  const Tensor x = Tensor::randn({2, 8, 5}, rng);
  CHECK(dback.forward(x) == d.forward(x));
}

TEST_CASE("checkpoint loads into the other precision") {
  const auto g = Generator<float>::init(small_generator(), 14);
  std::stringstream ss;
  write_checkpoint(ss, g);
  const auto gd = read_generator<double>(ss);
  CHECK(gd.output_conv.kernel == g.output_conv.kernel.cast<double>());
}

TEST_CASE("checkpoint errors") {
  const auto g = Generator<float>::init(small_generator(), 15);
  std::stringstream ss;
  write_checkpoint(ss, g);
  const std::string bytes = ss.str();

  std::stringstream wrong_kind(bytes);
  CHECK_THROWS_AS(read_discriminator<float>(wrong_kind), CheckpointError);

  std::stringstream bad_magic("XXXX" + bytes.substr(4));
  CHECK_THROWS_AS(read_generator<float>(bad_magic), IoError);

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_generator<float>(truncated), IoError);

  std::stringstream renamed(rewrite_manifest(bytes, [](nlohmann::json& m) {
    auto& t = m["tensors"];
    t["bogus"] = t["output_conv.bias"];
    t.erase("output_conv.bias");
  }));
  try {
    read_generator<float>(renamed);
    FAIL("expected CheckpointError");
  } catch (const CheckpointError& e) {
    REQUIRE(e.problems().size() == 2);
    CHECK(e.problems()[0].find("output_conv.bias") != std::string::npos);
    CHECK(e.problems()[1].find("bogus") != std::string::npos);
  }

  std::stringstream reshaped(rewrite_manifest(bytes, [](nlohmann::json& m) {
    m["config"]["out_dim"] = 4;
  }));
  CHECK_THROWS_AS(read_generator<float>(reshaped), CheckpointError);

  CHECK_THROWS_AS(load_generator<float>("/nonexistent/g.ckpt"), IoError);
}

}  // TEST_SUITE
