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

// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "oracles.hpp"

#include "dygan/cli/bench.hpp"
#include "dygan/cli/commands.hpp"
#include "dygan/gradcheck/gradcheck.hpp"
#include "dygan/layers.hpp"
#include "dygan/model.hpp"
#include "dygan/tensor_io.hpp"
#include "dygan/training.hpp"

using namespace dygan;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << name << ": " << o.detail
            << std::endl;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  if (code != 0) std::cerr << e.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const fs::path kWork = fs::temp_directory_path() / "dygan_acceptance";

Outcome gradient_correctness() {
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  const gradcheck::GradCheckOptions opts{.step = 1e-5, .tolerance = 1e-4};
  const auto t0 = std::chrono::steady_clock::now();
  const auto reports = gradcheck::check_all(seeds, opts);
  const double secs = seconds_since(t0);
  bool pass = secs < 120.0;
  double worst = 0.0;
  std::string worst_layer, failed;
  for (const auto& r : reports) {
    pass = pass && r.pass && r.seeds.size() >= 5;
    if (!r.pass) failed += " " + r.layer;
    if (r.max_error() >= worst) {
      worst = r.max_error();
      worst_layer = r.layer;
    }
  }
  return {pass, std::to_string(reports.size()) + " layer kinds x 5 seeds, max rel err " +
                    fmt("%.2e", worst) + " (" + worst_layer + "), " + fmt("%.2f", secs) + " s" +
                    (failed.empty() ? "" : "; failed:" + failed)};
}

Outcome oracle_equivalence() {
  // The criterion is a 32-bit comparison, so the oracles run in float too.
  // The gap to a 64-bit evaluation of the same oracle is reported alongside.
  Rng rng(2024);
  double worst_lconv = 0.0, worst_dyn = 0.0, worst_conv = 0.0, worst_f64 = 0.0;
  const std::size_t heads[] = {1, 2, 4, 8};
  using oracle::to_double;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t h = heads[rng.index(4)];
    const std::size_t c = h * (1 + rng.index(16 / h));
    const std::size_t b = 1 + rng.index(2), t = 1 + rng.index(16), k = 2 * rng.index(4) + 1;
    const Tensor x = Tensor::randn({b, t, c}, rng);

    LconvLayer<float> lconv(k, h);
    lconv.kernel = Tensor::randn({k, h}, rng);
    const Tensor ly = lconv.forward(x);
    worst_lconv = std::max(worst_lconv, max_abs_diff(ly, oracle::lconv(x, lconv.kernel)));
    worst_f64 = std::max(worst_f64, max_abs_diff(to_double(ly),
                                                 oracle::lconv(to_double(x), to_double(lconv.kernel))));

    auto dyn = DynConvLayer<float>::init(c, k, h, rng, trial % 2 == 1);
    dyn.b1 = Tensor::randn(dyn.b1.shape(), rng);
    dyn.b2 = Tensor::randn(dyn.b2.shape(), rng);
    const Tensor dy = dyn.forward(x);
    worst_dyn = std::max(worst_dyn, max_abs_diff(dy, oracle::dynconv(x, dyn.w1, dyn.b1, dyn.w2,
                                                                     dyn.b2, k, h,
                                                                     dyn.softmax_kernel)));
    worst_f64 = std::max(
        worst_f64, max_abs_diff(to_double(dy), oracle::dynconv(to_double(x), to_double(dyn.w1),
                                                               to_double(dyn.b1), to_double(dyn.w2),
                                                               to_double(dyn.b2), k, h,
                                                               dyn.softmax_kernel)));

    const std::size_t co = 1 + rng.index(16);
    auto conv = Conv1d<float>::init(c, co, k, rng);
    conv.bias = Tensor::randn({co}, rng);
    const Tensor cy = conv.forward(x);
    worst_conv = std::max(worst_conv, max_abs_diff(cy, oracle::conv1d(x, conv.kernel, conv.bias)));
    worst_f64 = std::max(worst_f64,
                         max_abs_diff(to_double(cy), oracle::conv1d(to_double(x), to_double(conv.kernel),
                                                                    to_double(conv.bias))));
  }
  const bool pass = worst_lconv < 1e-6 && worst_dyn < 1e-6 && worst_conv < 1e-6;
  return {pass, "20 configs (b<=2, t<=16, c<=16), max |diff| vs 32-bit oracle: lconv " +
                    fmt("%.2e", worst_lconv) + ", dynconv " + fmt("%.2e", worst_dyn) + ", conv1d " +
                    fmt("%.2e", worst_conv) + " (vs 64-bit oracle " + fmt("%.2e", worst_f64) + ")"};
}

Outcome identity_invariants() {
  Rng rng(7);
  bool lconv_ok = true, dyn_ok = true, wadain_ok = true;
  for (const std::size_t k : {1u, 3u, 5u, 7u}) {
    const Tensor x = Tensor::randn({2, 13, 16}, rng);
    lconv_ok = lconv_ok && LconvLayer<float>::identity(k, 4).forward(x) == x;

    auto dyn = DynConvLayer<float>::init(16, k, 4, rng);
    dyn.w2.set_zero();
    dyn.b2.set_zero();
    for (std::size_t hh = 0; hh < 4; ++hh) dyn.b2[(k / 2) * 4 + hh] = 1.0f;
    dyn_ok = dyn_ok && dyn.forward(x) == x;

    auto w = WadaINConv<float>::init(16, 8, k, 5, rng);
    w.gamma_weight.set_zero();
    w.gamma_bias.fill(1.0f);
    wadain_ok = wadain_ok && w.forward(x, Tensor::randn({2, 5}, rng)) == w.conv.forward(x);
  }
  auto yes = [](bool b) { return b ? "exact" : "MISMATCH"; };
  return {lconv_ok && dyn_ok && wadain_ok,
          std::string("center-tap lconv ") + yes(lconv_ok) + ", identity dynconv " + yes(dyn_ok) +
              ", WadaIN(gamma=1) vs conv " + yes(wadain_ok) + " for k in {1,3,5,7}"};
}

Outcome parameter_efficiency() {
  std::string out;
  if (cli({"params", "--json"}, &out) != 0) return {false, "params command failed"};
  const auto j = nlohmann::json::parse(out);
  const std::size_t dyn = j["dynconv"]["params"], attn = j["attention_params"];
  const std::size_t total = j["total"], gen = j["generator"]["total"];
  const double ratio = j["ratio"];
  const bool pass = dyn == 137752 && attn == 262144 && ratio >= 1.9 && total < 10'000'000 &&
                    gen == generator_param_count(GeneratorConfig{});
  return {pass, "dynconv " + std::to_string(dyn) + " vs attention " + std::to_string(attn) +
                    " (ratio " + fmt("%.3f", ratio) + "); generator " + std::to_string(gen) +
                    ", full model " + std::to_string(total) + " < 10M"};
}

Outcome loss_zero_cases() {
  Rng rng(5);
  bool zeros = true;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t b = 1 + rng.index(8);
    zeros = zeros && loss_adv_g(Tensor::full({b, 1}, 1.0f)) == 0.0;
    zeros = zeros && loss_adv_d(Tensor::full({b, 1}, 1.0f), Tensor({b + 1, 1})) == 0.0;
    const Tensor x = Tensor::randn({b, 4, 80}, rng);
    zeros = zeros && loss_recon(x, x) == 0.0;
  }
  // L_G = lambda * L_recon + L_adv_G: constant slope lambda, intercept L_adv_G.
  const LossWeights w;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double adv = rng.uniform(), r1 = rng.uniform(0, 3), r2 = rng.uniform(0, 3);
    const double g1 = total_losses(r1, adv, 0.0, w).generator;
    const double g2 = total_losses(r2, adv, 0.0, w).generator;
    if (r1 != r2) worst = std::max(worst, std::abs((g1 - g2) / (r1 - r2) - 5.0) / 5.0);
    worst = std::max(worst, std::abs(g1 - (5.0 * r1 + adv)) / std::max(1.0, g1));
  }
  const bool affine = worst < 1e-12 && w.lambda_recon == 5.0 &&
                      total_losses(0.0, 0.3, 0.0, w).generator == 0.3;
  return {zeros && affine, std::string("adversarial optima ") + (zeros ? "exactly 0" : "NONZERO") +
                               "; L_G slope vs L_recon = lambda 5, max rel deviation " +
                               fmt("%.1e", worst)};
}

Outcome toy_convergence() {
  fs::remove_all(kWork / "recon");
  const auto t0 = std::chrono::steady_clock::now();
  if (cli({"train-toy", "--out", (kWork / "recon").string()}) != 0)
    return {false, "recon-only run failed"};
  const double secs = seconds_since(t0);
  const auto rep = nlohmann::json::parse(slurp(kWork / "recon" / "report.json"));
  const double final_l1 = rep["final_recon"];
  const std::size_t steps = rep["steps"];
  const bool recon_ok = final_l1 < 0.05 && steps <= 2000 && secs < 300.0;

  // Held-out utterance through the CLI conversion path.
  const fs::path held = kWork / "heldout";
  fs::remove_all(held);
  double heldout_l1 = INFINITY;
  if (cli({"synth", "--frames", "300", "--speaker", "1", "--out", held.string()}) == 0 &&
      cli({"convert", "--checkpoint", (kWork / "recon" / "generator.ckpt").string(), "--z",
           (held / "z.dyt").string(), "--spk", (held / "spk.dyt").string(), "--out",
           (held / "out.dyt").string()}) == 0)
    heldout_l1 = loss_recon(load_dyt_as<float>(held / "target.dyt"),
                            load_dyt_as<float>(held / "out.dyt"));
  const bool heldout_ok = heldout_l1 < 2.0 * final_l1;

  // Adversarial: 1:1 schedule at the published learning rates.
  fs::remove_all(kWork / "adv");
  std::ofstream(kWork / "adv.json")
      << R"({"train": {"mode": "adversarial", "lr_g": 1e-4, "lr_d": 2e-5, "epochs": 63}})";
  const auto t1 = std::chrono::steady_clock::now();
  if (cli({"train-toy", "--config", (kWork / "adv.json").string(), "--out",
           (kWork / "adv").string()}) != 0)
    return {false, "adversarial run failed or diverged"};
  const double adv_secs = seconds_since(t1);
  const auto adv = nlohmann::json::parse(slurp(kWork / "adv" / "report.json"));
  const std::size_t adv_steps = adv["steps"];
  const double d_min = adv["d_min"], d_max = adv["d_max"];
  bool finite = true;
  std::istringstream lines(slurp(kWork / "adv" / "curve.jsonl"));
  std::string line;
  while (std::getline(lines, line)) {
    const auto r = nlohmann::json::parse(line);
    for (const char* key : {"recon", "adv_g", "adv_d"})
      finite = finite && r.contains(key) && r[key].is_number() && std::isfinite(r[key].get<double>());
  }
  const bool adv_ok = adv_steps >= 500 && finite && d_min > 0.0 && d_max < 1.0;

  return {recon_ok && heldout_ok && adv_ok,
          "recon-only L1 " + fmt("%.4f", final_l1) + " after " + std::to_string(steps) +
              " steps in " + fmt("%.1f", secs) + " s; held-out L1 " + fmt("%.4f", heldout_l1) +
              " (< 2x train); adversarial " + std::to_string(adv_steps) + " steps in " +
              fmt("%.1f", adv_secs) + " s, losses " + (finite ? "finite" : "NON-FINITE") +
              ", D in [" + fmt("%.4f", d_min) + ", " + fmt("%.4f", d_max) + "]"};
}

Outcome decoding_efficiency() {
  cli::BenchOptions opts;
  opts.lengths = {512, 1024};
  opts.reps = 7;
  opts.warmup = 1;
  const auto r = cli::run_bench(GeneratorConfig{}, opts);
  const double ratio = r.timings[1].median_ms / r.timings[0].median_ms;
  return {ratio >= 1.5 && ratio <= 3.0,
          "paper-scale generator median " + fmt("%.1f", r.timings[0].median_ms) + " ms @512, " +
              fmt("%.1f", r.timings[1].median_ms) + " ms @1024, ratio " + fmt("%.3f", ratio) +
              ", generator-only RTF " + fmt("%.4f", r.timings[1].rtf)};
}

Outcome determinism_serialization() {
  bool curves = true;
  for (const char* mode : {"recon_only", "adversarial"}) {
    std::string a_dir = (kWork / (std::string("det_a_") + mode)).string();
    std::string b_dir = (kWork / (std::string("det_b_") + mode)).string();
    for (const auto& d : {a_dir, b_dir}) {
      fs::remove_all(d);
      if (cli({"train-toy", "--out", d, "--mode", mode, "--epochs", "8", "--seed", "11"}) != 0)
        return {false, std::string("training run failed: ") + mode};
    }
    const std::string ca = slurp(fs::path(a_dir) / "curve.jsonl");
    curves = curves && !ca.empty() && ca == slurp(fs::path(b_dir) / "curve.jsonl") &&
             slurp(fs::path(a_dir) / "generator.ckpt") == slurp(fs::path(b_dir) / "generator.ckpt");
  }

  const fs::path ckpt = kWork / "recon" / "generator.ckpt";
  const auto g = load_generator<float>(ckpt);
  save_checkpoint(g, kWork / "resaved.ckpt");
  const bool bytes_equal = slurp(ckpt) == slurp(kWork / "resaved.ckpt");
  const auto g2 = load_generator<float>(kWork / "resaved.ckpt");
  Rng rng(3);
  const Tensor z = Tensor::randn({2, 40, g.config().in_dim}, rng);
  const Tensor s = Tensor::randn({2, g.config().spk_dim}, rng);
  const bool outputs_equal = g.forward(z, s) == g2.forward(z, s);

  const auto d = load_discriminator<float>(kWork / "adv" / "discriminator.ckpt");
  save_checkpoint(d, kWork / "resaved_d.ckpt");
  const bool d_equal = slurp(kWork / "adv" / "discriminator.ckpt") == slurp(kWork / "resaved_d.ckpt");

  auto yes = [](bool b) { return b ? "identical" : "DIFFERENT"; };
  return {curves && bytes_equal && outputs_equal && d_equal,
          std::string("repeated seeded runs ") + yes(curves) + " (both modes); checkpoint bytes " +
              yes(bytes_equal && d_equal) + " after load/save; forward outputs " +
              yes(outputs_equal)};
}

}  // namespace

int main() {
  fs::create_directories(kWork);
  report(1, "gradient correctness", gradient_correctness);
  report(2, "oracle equivalence", oracle_equivalence);
  report(3, "identity invariants", identity_invariants);
  report(4, "parameter efficiency", parameter_efficiency);
  report(5, "loss zero cases", loss_zero_cases);
  report(6, "toy convergence", toy_convergence);
  report(7, "decoding efficiency", decoding_efficiency);
  report(8, "determinism and serialization", determinism_serialization);
  return failures == 0 ? 0 : 1;
}
