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

#include "dygan/training/trainer.hpp"

#include <chrono>
#include <cmath>

#include "dygan/training/adam.hpp"

namespace dygan {

TrainMode parse_train_mode(const std::string& s) {
  if (s == "recon_only") return TrainMode::recon_only;
  if (s == "adversarial") return TrainMode::adversarial;
  throw ConfigError("mode must be \"recon_only\" or \"adversarial\", got \"" + s + "\"");
}

const char* to_string(TrainMode m) {
  return m == TrainMode::recon_only ? "recon_only" : "adversarial";
}

void TrainConfig::validate() const {
  if (!(lr_g > 0.0) || !(lr_d > 0.0)) throw ConfigError("train: learning rates must be positive");
  if (batch == 0) throw ConfigError("train.batch must be >= 1");
  if (segment_frames < 16) throw ConfigError("train.segment_frames must be >= 16");
  if (log_every == 0) throw ConfigError("train.log_every must be >= 1");
  weights.validate();
}

ToySetup ToySetup::defaults() {
  ToySetup s;
  s.generator = {.in_dim = 16,
                 .hidden = 32,
                 .out_dim = 80,
                 .n_blocks = 2,
                 .k = 3,
                 .h = 4,
                 .spk_dim = 8,
                 .conv_kernel = 3,
                 .softmax_kernel = false};
  s.discriminator = {.mel_bins = 80, .base_channels = 4, .max_channels = 8, .n_blocks = 4};
  s.train.lr_g = 1e-3;  // 1e-4 leaves the toy model far from converged after 2000 steps
  s.train.epochs = 250;  // 2 speakers x 32 utterances / batch 8 = 8 steps per epoch
  return s;
}

void ToySetup::validate() const {
  generator.validate();
  discriminator.validate();
  data.validate();
  train.validate();
  if (discriminator.mel_bins != generator.out_dim)
    throw ConfigError("discriminator.mel_bins must equal generator.out_dim");
  if (train.segment_frames < discriminator.min_frames())
    throw ConfigError("train.segment_frames must be >= " +
                      std::to_string(discriminator.min_frames()) +
                      " for this discriminator depth");
}

std::uint64_t task_seed(std::uint64_t seed) { return Rng(seed).fork(0).next_u64(); }
std::uint64_t heldout_seed(std::uint64_t seed) { return Rng(seed).fork(3).next_u64(); }

namespace {

struct Batch {
  Tensor z, x, s;
};

Batch make_batch(const std::vector<Utterance<float>>& data, const SyntheticTask<float>& task,
                 const std::vector<std::size_t>& order, std::size_t first, std::size_t count,
                 std::size_t frames, Rng& rng) {
  const std::size_t in = data.front().z.dim(1), out = data.front().x.dim(1);
  const std::size_t spk = task.speaker_embeddings().dim(1);
  Batch b{Tensor({count, frames, in}), Tensor({count, frames, out}), Tensor({count, spk})};
  for (std::size_t i = 0; i < count; ++i) {
    const auto& u = data[order[first + i]];
    const std::size_t start = crop_start(u.z.dim(0), frames, rng);
    Tensor zc = crop_at(u.z, start, frames);
    Tensor xc = crop_at(u.x, start, frames);
    std::copy_n(zc.data(), zc.numel(), b.z.data() + i * frames * in);
    std::copy_n(xc.data(), xc.numel(), b.x.data() + i * frames * out);
    Tensor e = task.speaker_embedding(u.speaker);
    std::copy_n(e.data(), spk, b.s.data() + i * spk);
  }
  return b;
}

void check_finite(double v, const char* what, std::size_t step) {
  if (!std::isfinite(v))
    throw TrainingError(std::string("training diverged: ") + what + " is not finite at step " +
                            std::to_string(step),
                        step);
}

}  // namespace

double evaluate_recon(const Generator<float>& g, const SyntheticTask<float>& task,
                      const std::vector<Utterance<float>>& data, ReconNorm norm) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& u : data) {
    const std::size_t t = u.z.dim(0);
    Tensor s = task.speaker_embedding(u.speaker).reshaped({1, task.speaker_embeddings().dim(1)});
    Tensor y = g.forward(u.z.reshaped({1, t, u.z.dim(1)}), s);
    sum += loss_recon(u.x.reshaped({1, t, u.x.dim(1)}), y, norm) * double(u.x.numel());
    count += u.x.numel();
  }
  return sum / double(count);
}

TrainResult train_toy(const ToySetup& setup, const std::function<void(const LogRecord&)>& on_log) {
  setup.validate();
  const TrainConfig& cfg = setup.train;
  const Rng root(cfg.seed);

  SyntheticTask<float> task(setup.data, setup.generator.in_dim, setup.generator.out_dim,
                            setup.generator.spk_dim, task_seed(cfg.seed));
  Rng data_rng = root.fork(1);
  const std::vector<Utterance<float>> data = task.make_dataset(data_rng);
  Rng batch_rng = root.fork(2);

  TrainResult result{{},
                     Generator<float>::init(setup.generator, root.fork(4).next_u64()),
                     Discriminator<float>::init(setup.discriminator, root.fork(5).next_u64())};
  Generator<float>& gen = result.generator;
  Discriminator<float>& disc = result.discriminator;
  TrainReport& report = result.report;

  Adam<float> opt_g({.lr = cfg.lr_g});
  Adam<float> opt_d({.lr = cfg.lr_d});
  Generator<float> grad_g = gen.zeros_like();
  Discriminator<float> grad_d = disc.zeros_like();
  Discriminator<float> scratch_d = disc.zeros_like();

  const std::size_t n = data.size();
  report.steps_per_epoch = (n + cfg.batch - 1) / cfg.batch;
  const std::size_t total_steps = report.steps_per_epoch * cfg.epochs;
  const double lambda = cfg.weights.lambda_recon;
  const auto t0 = std::chrono::steady_clock::now();
  auto note_d = [&](const Tensor& d) {
    for (float v : d.values()) {
      report.d_min = std::min(report.d_min.value_or(v), double(v));
      report.d_max = std::max(report.d_max.value_or(v), double(v));
    }
  };

  std::vector<std::size_t> order(n);
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i-- > 1;) std::swap(order[i], order[batch_rng.index(i + 1)]);

    for (std::size_t first = 0; first < n; first += cfg.batch) {
      ++step;
      const std::size_t count = std::min(cfg.batch, n - first);
      Batch b = make_batch(data, task, order, first, count, cfg.segment_frames, batch_rng);
      LogRecord rec;
      rec.step = step;

      if (cfg.mode == TrainMode::adversarial) {
        // Discriminator update on real and generated segments.
        Tensor fake = gen.forward(b.z, b.s);
        DiscriminatorCache<float> real_cache, fake_cache;
        Tensor d_real = disc.forward(b.x, &real_cache);
        Tensor d_fake = disc.forward(fake, &fake_cache);
        note_d(d_real);
        note_d(d_fake);
        const double l_d = loss_adv_d(d_real, d_fake);
        check_finite(l_d, "L_adv_D", step);
        auto gd = loss_adv_d_grad(d_real, d_fake);
        grad_d.for_each_param([](const std::string&, Tensor& t) { t.set_zero(); });
        disc.backward(real_cache, gd.real, grad_d);
        disc.backward(fake_cache, gd.fake, grad_d);
        opt_d.step(disc, grad_d);
        rec.adv_d = l_d;
      }

      // Generator update.
      GeneratorCache<float> gcache;
      Tensor fake = gen.forward(b.z, b.s, &gcache);
      const double l_recon = loss_recon(b.x, fake, cfg.recon_norm);
      check_finite(l_recon, "L_recon", step);
      Tensor grad_fake = loss_recon_grad(b.x, fake, cfg.recon_norm);
      grad_fake *= static_cast<float>(lambda);
      if (cfg.mode == TrainMode::adversarial) {
        DiscriminatorCache<float> cache;
        Tensor d_fake = disc.forward(fake, &cache);
        note_d(d_fake);
        const double l_adv = loss_adv_g(d_fake);
        check_finite(l_adv, "L_adv_G", step);
        grad_fake += disc.backward(cache, loss_adv_g_grad(d_fake), scratch_d);
        rec.adv_g = l_adv;
      }
      grad_g.for_each_param([](const std::string&, Tensor& t) { t.set_zero(); });
      gen.backward(gcache, grad_fake, grad_g);
      opt_g.step(gen, grad_g);
      rec.recon = l_recon;

      if (step % cfg.log_every == 0 || step == total_steps) {
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                          .count();
        report.curve.push_back(rec);
        if (on_log) on_log(rec);
      }
    }
  }
  report.steps = step;
  report.final_recon = evaluate_recon(gen, task, data, cfg.recon_norm);
  double zero = 0.0;
  std::size_t count = 0;
  for (const auto& u : data) {
    zero += loss_recon(u.x, u.x.zeros_like(), cfg.recon_norm) * double(u.x.numel());
    count += u.x.numel();
  }
  report.zero_baseline = zero / double(count);
  return result;
}

}  // namespace dygan
