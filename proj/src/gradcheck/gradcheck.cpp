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

#include "dygan/gradcheck/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "dygan/layers.hpp"
#include "dygan/model/discriminator.hpp"
#include "dygan/model/generator.hpp"
#include "dygan/training/losses.hpp"

namespace dygan::gradcheck {

TensorD fd_gradient(const std::function<double(const TensorD&)>& f, const TensorD& x,
                    double step) {
  TensorD probe = x;
  TensorD grad(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + step;
    const double up = f(probe);
    probe[i] = orig - step;
    const double down = f(probe);
    probe[i] = orig;
    if (!std::isfinite(up) || !std::isfinite(down))
      throw OracleError("fd_gradient: non-finite evaluation at element " + std::to_string(i));
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

namespace {

struct Target {
  std::string name;
  TensorD* value;
  bool is_input;
};

// A scalar function of named tensors together with its hand-derived gradient.
struct Probe {
  std::vector<Target> targets;
  std::function<double()> loss;
  std::function<std::vector<TensorD>()> analytic;  // same order as targets
  std::shared_ptr<void> owner;
};

double dot(const TensorD& a, const TensorD& b) {
  require_same_shape(a.shape(), b.shape(), "gradcheck projection");
  double s = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) s += a[i] * b[i];
  return s;
}

template <typename Layer>
void add_params(Probe& p, Layer& layer, const std::string& prefix) {
  layer.for_each_param(prefix, [&](const std::string& name, TensorD& t) {
    p.targets.push_back({name, &t, false});
  });
}

template <typename Net>
void add_net_params(Probe& p, Net& net) {
  net.for_each_param([&](const std::string& name, TensorD& t) {
    p.targets.push_back({name, &t, false});
  });
}

template <typename Layer>
void append_grads(std::vector<TensorD>& out, const Layer& grads, const std::string& prefix) {
  grads.for_each_param(prefix, [&](const std::string&, const TensorD& t) { out.push_back(t); });
}

template <typename Net>
void append_net_grads(std::vector<TensorD>& out, const Net& grads) {
  grads.for_each_param([&](const std::string&, const TensorD& t) { out.push_back(t); });
}

void randomize(TensorD& t, Rng& rng, double stddev = 1.0) {
  t = TensorD::randn(t.shape(), rng, stddev);
}

Probe make_probe(LayerKind kind, const ShapeSpec& sh, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t b = sh.batch, t = sh.time, c = sh.channels;
  Probe p;
  switch (kind) {
    case LayerKind::lconv: {
      struct S {
        LconvLayer<double> layer;
        TensorD x, r;
      };
      auto s = std::make_shared<S>();
      s->layer = LconvLayer<double>(sh.kernel, sh.heads);
      randomize(s->layer.kernel, rng);
      s->x = TensorD::randn({b, t, c}, rng);
      s->r = TensorD::randn({b, t, c}, rng);
      p.targets.push_back({"x", &s->x, true});
      add_params(p, s->layer, "lconv");
      p.loss = [s] { return dot(s->layer.forward(s->x), s->r); };
      p.analytic = [s] {
        auto g = s->layer.zeros_like();
        std::vector<TensorD> out{s->layer.backward(s->x, s->r, g)};
        append_grads(out, g, "lconv");
        return out;
      };
      p.owner = s;
      break;
    }
    case LayerKind::dynconv:
    case LayerKind::dynconv_softmax: {
      struct S {
        DynConvLayer<double> layer;
        TensorD x, r;
      };
      auto s = std::make_shared<S>();
      s->layer = DynConvLayer<double>::init(c, sh.kernel, sh.heads, rng,
                                            kind == LayerKind::dynconv_softmax);
      randomize(s->layer.b1, rng, 0.5);
      randomize(s->layer.b2, rng, 0.5);
      s->x = TensorD::randn({b, t, c}, rng);
      s->r = TensorD::randn({b, t, c}, rng);
      p.targets.push_back({"x", &s->x, true});
      add_params(p, s->layer, "dynconv");
      p.loss = [s] { return dot(s->layer.forward(s->x), s->r); };
      p.analytic = [s] {
        auto g = s->layer.zeros_like();
        DynConvCache<double> cache;
        s->layer.forward(s->x, &cache);
        std::vector<TensorD> out{s->layer.backward(cache, s->r, g)};
        append_grads(out, g, "dynconv");
        return out;
      };
      p.owner = s;
      break;
    }
    case LayerKind::adain: {
      struct S {
        AdaIN<double> layer;
        TensorD x, s, r;
      };
      auto s = std::make_shared<S>();
      s->layer = AdaIN<double>::init(sh.spk_dim, c, rng);
      randomize(s->layer.gamma_bias, rng);
      randomize(s->layer.beta_bias, rng);
      s->x = TensorD::randn({b, t, c}, rng);
      s->s = TensorD::randn({b, sh.spk_dim}, rng);
      s->r = TensorD::randn({b, t, c}, rng);
      p.targets.push_back({"x", &s->x, true});
      p.targets.push_back({"s", &s->s, true});
      add_params(p, s->layer, "adain");
      p.loss = [s] { return dot(s->layer.forward(s->x, s->s), s->r); };
      p.analytic = [s] {
        auto g = s->layer.zeros_like();
        AdaINCache<double> cache;
        s->layer.forward(s->x, s->s, &cache);
        auto in = s->layer.backward(cache, s->r, g);
        std::vector<TensorD> out{in.x, in.s};
        append_grads(out, g, "adain");
        return out;
      };
      p.owner = s;
      break;
    }
    case LayerKind::wadain_conv: {
      struct S {
        WadaINConv<double> layer;
        TensorD x, s, r;
      };
      auto s = std::make_shared<S>();
      s->layer = WadaINConv<double>::init(c, sh.out_channels, sh.kernel, sh.spk_dim, rng);
      randomize(s->layer.conv.bias, rng);
      s->x = TensorD::randn({b, t, c}, rng);
      s->s = TensorD::randn({b, sh.spk_dim}, rng);
      s->r = TensorD::randn({b, t, sh.out_channels}, rng);
      p.targets.push_back({"x", &s->x, true});
      p.targets.push_back({"s", &s->s, true});
      add_params(p, s->layer, "wadain");
      p.loss = [s] { return dot(s->layer.forward(s->x, s->s), s->r); };
      p.analytic = [s] {
        auto g = s->layer.zeros_like();
        WadaINCache<double> cache;
        s->layer.forward(s->x, s->s, &cache);
        auto in = s->layer.backward(cache, s->r, g);
        std::vector<TensorD> out{in.x, in.s};
        append_grads(out, g, "wadain");
        return out;
      };
      p.owner = s;
      break;
    }
    case LayerKind::conv1d: {
      struct S {
        Conv1d<double> layer;
        TensorD x, r;
      };
      auto s = std::make_shared<S>();
      s->layer = Conv1d<double>::init(c, sh.out_channels, sh.kernel, rng);
      randomize(s->layer.bias, rng);
      s->x = TensorD::randn({b, t, c}, rng);
      s->r = TensorD::randn({b, t, sh.out_channels}, rng);
      p.targets.push_back({"x", &s->x, true});
      add_params(p, s->layer, "conv1d");
      p.loss = [s] { return dot(s->layer.forward(s->x), s->r); };
      p.analytic = [s] {
        auto g = s->layer.zeros_like();
        std::vector<TensorD> out{s->layer.backward(s->x, s->r, g)};
        append_grads(out, g, "conv1d");
        return out;
      };
      p.owner = s;
      break;
    }
    case LayerKind::conv2d:
    case LayerKind::conv2d_strided: {
      struct S {
        Conv2d<double> layer;
        TensorD x, r;
      };
      auto s = std::make_shared<S>();
      const std::size_t stride = kind == LayerKind::conv2d_strided ? 2 : 1;
      s->layer = Conv2d<double>::init(c, sh.out_channels, sh.kernel, sh.kernel, rng, stride);
      randomize(s->layer.bias, rng);
      s->x = TensorD::randn({b, sh.height, sh.width, c}, rng);
      s->r = TensorD::randn(s->layer.output_shape(s->x.shape()), rng);
      p.targets.push_back({"x", &s->x, true});
      add_params(p, s->layer, "conv2d");
      p.loss = [s] { return dot(s->layer.forward(s->x), s->r); };
      p.analytic = [s] {
        auto g = s->layer.zeros_like();
        std::vector<TensorD> out{s->layer.backward(s->x, s->r, g)};
        append_grads(out, g, "conv2d");
        return out;
      };
      p.owner = s;
      break;
    }
    case LayerKind::avgpool2d: {
      struct S {
        AvgPool2d pool;
        TensorD x, r;
      };
      auto s = std::make_shared<S>();
      s->x = TensorD::randn({b, sh.height, sh.width, c}, rng);
      s->r = TensorD::randn(s->pool.output_shape(s->x.shape()), rng);
      p.targets.push_back({"x", &s->x, true});
      p.loss = [s] { return dot(s->pool.forward(s->x), s->r); };
      p.analytic = [s] { return std::vector<TensorD>{s->pool.backward(s->x.shape(), s->r)}; };
      p.owner = s;
      break;
    }
    case LayerKind::layer_norm: {
      struct S {
        LayerNorm<double> layer;
        TensorD x, r;
      };
      auto s = std::make_shared<S>();
      s->layer = LayerNorm<double>(c);
      randomize(s->layer.gain, rng);
      randomize(s->layer.bias, rng);
      s->x = TensorD::randn({b, t, c}, rng);
      s->r = TensorD::randn({b, t, c}, rng);
      p.targets.push_back({"x", &s->x, true});
      add_params(p, s->layer, "layer_norm");
      p.loss = [s] { return dot(s->layer.forward(s->x), s->r); };
      p.analytic = [s] {
        auto g = s->layer.zeros_like();
        LayerNormCache<double> cache;
        s->layer.forward(s->x, &cache);
        std::vector<TensorD> out{s->layer.backward(cache, s->r, g)};
        append_grads(out, g, "layer_norm");
        return out;
      };
      p.owner = s;
      break;
    }
    case LayerKind::glu: {
      struct S {
        TensorD x, r;
      };
      auto s = std::make_shared<S>();
      s->x = TensorD::randn({b, t, 2 * c}, rng);
      s->r = TensorD::randn({b, t, c}, rng);
      p.targets.push_back({"x", &s->x, true});
      p.loss = [s] { return dot(glu(s->x), s->r); };
      p.analytic = [s] { return std::vector<TensorD>{glu_backward(s->x, s->r)}; };
      p.owner = s;
      break;
    }
    case LayerKind::loss_recon: {
      struct S {
        TensorD x, x_hat;
      };
      auto s = std::make_shared<S>();
      s->x = TensorD::randn({b, t, c}, rng);
      s->x_hat = TensorD::randn({b, t, c}, rng);
      // Keep clear of the |.| kink.
      for (std::size_t i = 0; i < s->x.numel(); ++i) {
        const double d = s->x_hat[i] - s->x[i];
        if (std::abs(d) < 1e-3) s->x_hat[i] = s->x[i] + (d < 0 ? -1e-3 : 1e-3);
      }
      p.targets.push_back({"x_hat", &s->x_hat, true});
      p.loss = [s] { return loss_recon(s->x, s->x_hat, ReconNorm::l1); };
      p.analytic = [s] {
        return std::vector<TensorD>{loss_recon_grad(s->x, s->x_hat, ReconNorm::l1)};
      };
      p.owner = s;
      break;
    }
    case LayerKind::loss_adv_g: {
      struct S {
        TensorD d_fake;
      };
      auto s = std::make_shared<S>();
      s->d_fake = TensorD::uniform({b, 1}, rng, 0.05, 0.95);
      p.targets.push_back({"d_fake", &s->d_fake, true});
      p.loss = [s] { return loss_adv_g(s->d_fake); };
      p.analytic = [s] { return std::vector<TensorD>{loss_adv_g_grad(s->d_fake)}; };
      p.owner = s;
      break;
    }
    case LayerKind::loss_adv_d: {
      struct S {
        TensorD d_real, d_fake;
      };
      auto s = std::make_shared<S>();
      s->d_real = TensorD::uniform({b, 1}, rng, 0.05, 0.95);
      s->d_fake = TensorD::uniform({b + 1, 1}, rng, 0.05, 0.95);
      p.targets.push_back({"d_real", &s->d_real, true});
      p.targets.push_back({"d_fake", &s->d_fake, true});
      p.loss = [s] { return loss_adv_d(s->d_real, s->d_fake); };
      p.analytic = [s] {
        auto g = loss_adv_d_grad(s->d_real, s->d_fake);
        return std::vector<TensorD>{g.real, g.fake};
      };
      p.owner = s;
      break;
    }
    case LayerKind::generator: {
      struct S {
        Generator<double> net;
        TensorD z, s, r;
      };
      auto s = std::make_shared<S>();
      GeneratorConfig cfg{.in_dim = 3,
                          .hidden = c,
                          .out_dim = 2,
                          .n_blocks = 2,
                          .k = sh.kernel,
                          .h = sh.heads,
                          .spk_dim = sh.spk_dim,
                          .conv_kernel = 3};
      s->net = Generator<double>::init(cfg, rng.next_u64());
      // Move norms and biases off their initial values so every path is exercised.
      s->net.for_each_param([&](const std::string& name, TensorD& v) {
        if (name.ends_with("bias") || name.ends_with("gain") || name.ends_with("b1") ||
            name.ends_with("b2"))
          for (auto& e : v.values()) e += 0.3 * rng.normal();
      });
      s->z = TensorD::randn({b, t, cfg.in_dim}, rng);
      s->s = TensorD::randn({b, cfg.spk_dim}, rng);
      s->r = TensorD::randn({b, t, cfg.out_dim}, rng);
      p.targets.push_back({"z", &s->z, true});
      p.targets.push_back({"s", &s->s, true});
      add_net_params(p, s->net);
      p.loss = [s] { return dot(s->net.forward(s->z, s->s), s->r); };
      p.analytic = [s] {
        auto g = s->net.zeros_like();
        GeneratorCache<double> cache;
        s->net.forward(s->z, s->s, &cache);
        auto in = s->net.backward(cache, s->r, g);
        std::vector<TensorD> out{in.z, in.s};
        append_net_grads(out, g);
        return out;
      };
      p.owner = s;
      break;
    }
    case LayerKind::discriminator: {
      struct S {
        Discriminator<double> net;
        TensorD x, r;
      };
      auto s = std::make_shared<S>();
      DiscriminatorConfig cfg{.mel_bins = 5, .base_channels = 2, .max_channels = 4, .n_blocks = 2};
      s->net = Discriminator<double>::init(cfg, rng.next_u64());
      const std::size_t frames = std::max(t, cfg.min_frames());
      s->x = TensorD::randn({b, frames, cfg.mel_bins}, rng);
      s->r = TensorD::randn({b, 1}, rng);
      p.targets.push_back({"x", &s->x, true});
      add_net_params(p, s->net);
      p.loss = [s] { return dot(s->net.forward(s->x), s->r); };
      p.analytic = [s] {
        auto g = s->net.zeros_like();
        DiscriminatorCache<double> cache;
        s->net.forward(s->x, &cache);
        std::vector<TensorD> out{s->net.backward(cache, s->r, g)};
        append_net_grads(out, g);
        return out;
      };
      p.owner = s;
      break;
    }
  }
  return p;
}

const std::map<LayerKind, std::string>& kind_names() {
  static const std::map<LayerKind, std::string> names = {
      {LayerKind::lconv, "lconv"},
      {LayerKind::dynconv, "dynconv"},
      {LayerKind::dynconv_softmax, "dynconv_softmax"},
      {LayerKind::adain, "adain"},
      {LayerKind::wadain_conv, "wadain_conv"},
      {LayerKind::conv1d, "conv1d"},
      {LayerKind::conv2d, "conv2d"},
      {LayerKind::conv2d_strided, "conv2d_strided"},
      {LayerKind::avgpool2d, "avgpool2d"},
      {LayerKind::layer_norm, "layer_norm"},
      {LayerKind::glu, "glu"},
      {LayerKind::loss_recon, "loss_recon"},
      {LayerKind::loss_adv_g, "loss_adv_g"},
      {LayerKind::loss_adv_d, "loss_adv_d"},
      {LayerKind::generator, "generator"},
      {LayerKind::discriminator, "discriminator"},
  };
  return names;
}

}  // namespace

std::vector<LayerKind> all_layer_kinds() {
  std::vector<LayerKind> out;
  for (const auto& [k, _] : kind_names()) out.push_back(k);
  return out;
}

std::string to_string(LayerKind kind) { return kind_names().at(kind); }

LayerKind parse_layer_kind(const std::string& name) {
  for (const auto& [k, n] : kind_names())
    if (n == name) return k;
  throw ConfigError("unknown layer kind \"" + name + "\"");
}

double GradCheckReport::max_error() const {
  double m = 0.0;
  for (const auto& e : params) m = std::max(m, e.max_rel_error);
  for (const auto& e : inputs) m = std::max(m, e.max_rel_error);
  return m;
}

GradCheckReport check_layer(LayerKind kind, const ShapeSpec& shape,
                            std::span<const std::uint64_t> seeds,
                            const GradCheckOptions& options) {
  GradCheckReport report;
  report.layer = to_string(kind);
  report.seeds.assign(seeds.begin(), seeds.end());
  report.step = options.step;
  report.tolerance = options.tolerance;

  std::map<std::string, TensorError> errors;
  std::vector<std::string> order;
  for (const std::uint64_t seed : seeds) {
    Probe probe = make_probe(kind, shape, seed);
    std::vector<TensorD> analytic = probe.analytic();
    for (std::size_t ti = 0; ti < probe.targets.size(); ++ti) {
      const Target& target = probe.targets[ti];
      TensorD& a = analytic.at(ti);
      if (options.flip_sign) a *= -1.0;
      if (!all_finite(a) && report.failure.empty())
        report.failure = "non-finite analytic gradient for " + target.name + " (seed " +
                         std::to_string(seed) + ")";
      TensorD* value = target.value;
      const TensorD saved = *value;
      TensorD numeric = fd_gradient(
          [&](const TensorD& v) {
            *value = v;
            return probe.loss();
          },
          saved, options.step);
      *value = saved;

      auto [it, fresh] = errors.try_emplace(target.name);
      if (fresh) {
        order.push_back(target.name);
        it->second.name = target.name;
        it->second.is_input = target.is_input;
      }
      for (std::size_t i = 0; i < a.numel(); ++i) {
        const double e = relative_error(a[i], numeric[i]);
        if (!(e <= it->second.max_rel_error)) {
          it->second.max_rel_error = std::isnan(e) ? INFINITY : e;
          it->second.worst_index = i;
          it->second.worst_seed = seed;
        }
      }
    }
  }
  for (const auto& name : order) {
    const TensorError& e = errors.at(name);
    (e.is_input ? report.inputs : report.params).push_back(e);
  }
  report.pass = report.failure.empty() && !order.empty() &&
                report.max_error() < options.tolerance;
  return report;
}

std::vector<GradCheckReport> check_all(std::span<const std::uint64_t> seeds,
                                       const GradCheckOptions& options) {
  std::vector<GradCheckReport> out;
  for (LayerKind k : all_layer_kinds()) out.push_back(check_layer(k, ShapeSpec{}, seeds, options));
  return out;
}

nlohmann::json to_json(const GradCheckReport& r) {
  auto errs = [](const std::vector<TensorError>& v) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : v)
      j.push_back({{"name", e.name},
                   {"max_rel_error", e.max_rel_error},
                   {"worst_index", e.worst_index},
                   {"worst_seed", e.worst_seed}});
    return j;
  };
  nlohmann::json j = {{"layer", r.layer},       {"seeds", r.seeds},
                      {"step", r.step},         {"tolerance", r.tolerance},
                      {"pass", r.pass},         {"max_rel_error", r.max_error()},
                      {"params", errs(r.params)}, {"inputs", errs(r.inputs)}};
  if (!r.failure.empty()) j["failure"] = r.failure;
  return j;
}

}  // namespace dygan::gradcheck
