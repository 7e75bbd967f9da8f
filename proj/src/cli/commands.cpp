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

#include "dygan/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dygan/cli/bench.hpp"
#include "dygan/cli/config.hpp"
#include "dygan/errors.hpp"
#include "dygan/gradcheck/gradcheck.hpp"
#include "dygan/model.hpp"
#include "dygan/tensor_io.hpp"
#include "dygan/training.hpp"

namespace dygan::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string grouped(std::size_t n) {
  std::string s = std::to_string(n);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(static_cast<std::size_t>(i), ",");
  return s;
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::vector<std::size_t> parse_lengths(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || v == 0)
      throw ConfigError("--lengths: \"" + item + "\" is not a positive integer");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ConfigError("--lengths must list at least one length");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw IoError("write failed: " + path.string());
}

// ---- params ---------------------------------------------------------------

template <typename Net>
void print_breakdown(std::ostream& out, const std::string& title, const ParamBreakdown& b) {
  out << title << "\n";
  for (const auto& l : b.layers)
    out << "  " << std::left << std::setw(30) << l.layer << std::right << std::setw(12)
        << grouped(l.count) << "\n";
  out << "  " << std::left << std::setw(30) << "total" << std::right << std::setw(12)
      << grouped(b.total) << "\n";
}

json breakdown_json(const ParamBreakdown& b) {
  json layers = json::array();
  for (const auto& l : b.layers) layers.push_back({{"layer", l.layer}, {"params", l.count}});
  return {{"layers", layers}, {"total", b.total}};
}

int cmd_params(const std::string& config_path, bool as_json, std::ostream& out) {
  const ToySetup setup = load_setup(config_path, paper_setup());
  const auto& gc = setup.generator;
  const ParamBreakdown g = count_params(Generator<float>(gc));
  const ParamBreakdown d = count_params(Discriminator<float>(setup.discriminator));
  const std::size_t dyn = DynConvLayer<float>::param_count(gc.hidden, gc.k, gc.h);
  const std::size_t attn = attention_projection_params(gc.hidden);
  const double ratio = static_cast<double>(attn) / static_cast<double>(dyn);

  if (as_json) {
    out << json{{"generator", breakdown_json(g)},
                {"discriminator", breakdown_json(d)},
                {"total", g.total + d.total},
                {"dynconv", {{"channels", gc.hidden}, {"k", gc.k}, {"h", gc.h}, {"params", dyn}}},
                {"attention_params", attn},
                {"ratio", ratio}}
               .dump(2)
        << "\n";
    return kExitOk;
  }
  print_breakdown<Generator<float>>(out, "generator", g);
  print_breakdown<Discriminator<float>>(out, "discriminator", d);
  out << "model total: " << grouped(g.total + d.total) << "\n";
  out << "dynconv layer (c=" << gc.hidden << ", k=" << gc.k << ", h=" << gc.h
      << "): " << grouped(dyn) << "\n";
  out << "self-attention projections (4c^2): " << grouped(attn) << "\n";
  out << "ratio attention/dynconv: " << fixed(ratio, 3) << "\n";
  return kExitOk;
}

// ---- gradcheck ------------------------------------------------------------

int cmd_gradcheck(std::size_t n_seeds, double tol, double step, const std::string& layers,
                  bool as_json, std::ostream& out) {
  if (n_seeds == 0) throw ConfigError("--seeds must be >= 1");
  if (!(tol > 0.0)) throw ConfigError("--tol must be positive");
  if (!(step > 0.0)) throw ConfigError("--step must be positive");
  std::vector<gradcheck::LayerKind> kinds;
  if (layers.empty()) {
    kinds = gradcheck::all_layer_kinds();
  } else {
    std::stringstream ss(layers);
    std::string item;
    while (std::getline(ss, item, ',')) kinds.push_back(gradcheck::parse_layer_kind(item));
  }
  std::vector<std::uint64_t> seeds(n_seeds);
  for (std::size_t i = 0; i < n_seeds; ++i) seeds[i] = i + 1;
  const gradcheck::GradCheckOptions opts{.step = step, .tolerance = tol};

  bool all_pass = true;
  json reports = json::array();
  for (const auto kind : kinds) {
    const auto r = gradcheck::check_layer(kind, gradcheck::ShapeSpec{}, seeds, opts);
    all_pass = all_pass && r.pass;
    if (as_json) {
      reports.push_back(gradcheck::to_json(r));
      continue;
    }
    out << std::left << std::setw(18) << r.layer << std::right << " seeds=" << r.seeds.size()
        << " max_rel_err=" << std::scientific << std::setprecision(3) << r.max_error()
        << std::defaultfloat << "  " << (r.pass ? "PASS" : "FAIL") << "\n";
    if (!r.pass) {
      if (!r.failure.empty()) out << "    " << r.failure << "\n";
      for (const auto* group : {&r.inputs, &r.params})
        for (const auto& e : *group)
          if (!(e.max_rel_error < tol))
            out << "    " << e.name << ": " << e.max_rel_error << " at element "
                << e.worst_index << " (seed " << e.worst_seed << ")\n";
    }
  }
  if (as_json)
    out << json{{"pass", all_pass}, {"tolerance", tol}, {"step", step}, {"layers", reports}}.dump(2)
        << "\n";
  else
    out << (all_pass ? "all layers pass" : "gradient check FAILED") << "\n";
  return all_pass ? kExitOk : kExitFailure;
}

// ---- bench ----------------------------------------------------------------

int cmd_bench(const std::string& config_path, const std::string& lengths, BenchOptions opts,
              bool as_json, std::ostream& out) {
  const ToySetup setup = load_setup(config_path, paper_setup());
  opts.lengths = parse_lengths(lengths);
  const BenchResult r = run_bench(setup.generator, opts);
  if (as_json) {
    out << to_json(r).dump(2) << "\n";
    return kExitOk;
  }
  out << "generator forward, batch 1, " << r.reps << " reps after " << r.warmup
      << " warmup, threads " << r.threads << "\n";
  out << std::setw(8) << "frames" << std::setw(12) << "median_ms" << std::setw(12) << "p10_ms"
      << std::setw(12) << "p90_ms" << std::setw(14) << "frames/s" << std::setw(10) << "RTF"
      << "\n";
  for (const auto& t : r.timings)
    out << std::setw(8) << t.frames << std::setw(12) << fixed(t.median_ms, 3) << std::setw(12)
        << fixed(t.p10_ms, 3) << std::setw(12) << fixed(t.p90_ms, 3) << std::setw(14)
        << fixed(t.frames_per_second, 1) << std::setw(10) << fixed(t.rtf, 5) << "\n";
  for (std::size_t i = 1; i < r.timings.size(); ++i) {
    const auto& a = r.timings[i - 1];
    const auto& b = r.timings[i];
    out << "median(" << b.frames << ")/median(" << a.frames
        << ") = " << fixed(b.median_ms / a.median_ms, 3) << "\n";
  }
  out << "dynconv params " << grouped(r.dynconv_params) << " vs attention "
      << grouped(r.attention_params) << " (ratio " << fixed(r.param_ratio, 3) << ")\n";
  out << "note: RTF covers the generator only (10 ms hop); vocoder time is excluded\n";
  return kExitOk;
}

// ---- train-toy ------------------------------------------------------------

json record_json(const LogRecord& r, bool with_time) {
  json j = {{"step", r.step}, {"recon", r.recon}};
  if (r.adv_g) j["adv_g"] = *r.adv_g;
  if (r.adv_d) j["adv_d"] = *r.adv_d;
  if (with_time) j["wall_ms"] = r.wall_ms;
  return j;
}

struct TrainOverrides {
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
};

int cmd_train_toy(const std::string& config_path, const fs::path& out_dir,
                  const TrainOverrides& over, std::ostream& out, std::ostream& err) {
  ToySetup setup = ToySetup::defaults();
  if (!config_path.empty()) merge_setup(read_json_file(config_path), setup);
  if (!over.mode.empty()) setup.train.mode = parse_train_mode(over.mode);
  if (over.seed) setup.train.seed = *over.seed;
  if (over.epochs) setup.train.epochs = *over.epochs;
  setup.validate();

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  std::ofstream log(out_dir / "log.jsonl", std::ios::binary);
  std::ofstream curve(out_dir / "curve.jsonl", std::ios::binary);
  if (!log || !curve) throw IoError("cannot write logs under " + out_dir.string());

  TrainResult result;
  try {
    result = train_toy(setup, [&](const LogRecord& r) {
      log << record_json(r, true).dump() << "\n";
      curve << record_json(r, false).dump() << "\n";
      out << "step " << r.step << " recon " << r.recon;
      if (r.adv_g) out << " adv_g " << *r.adv_g << " adv_d " << *r.adv_d;
      out << "\n";
    });
  } catch (const TrainingError& e) {
    log.flush();
    curve.flush();
    err << "training diverged at step " << e.step() << ": " << e.what() << "\n";
    return kExitFailure;
  }
  log.close();
  curve.close();

  save_checkpoint(result.generator, out_dir / "generator.ckpt");
  save_checkpoint(result.discriminator, out_dir / "discriminator.ckpt");
  const TrainReport& rep = result.report;
  json report = {{"steps", rep.steps},
                 {"steps_per_epoch", rep.steps_per_epoch},
                 {"final_recon", rep.final_recon},
                 {"zero_baseline", rep.zero_baseline},
                 {"config", setup_to_json(setup)}};
  if (rep.d_min) report["d_min"] = *rep.d_min;
  if (rep.d_max) report["d_max"] = *rep.d_max;
  write_text(out_dir / "report.json", report.dump(2) + "\n");
  out << "steps " << rep.steps << " final " << to_string(setup.train.recon_norm) << " "
      << rep.final_recon << " (zero predictor " << rep.zero_baseline << ")\n";
  return kExitOk;
}

// ---- convert / synth ------------------------------------------------------

void require_extents(const std::string& what, const Shape& expected, const Shape& actual) {
  if (expected != actual)
    throw DimensionError(what + ": expected " + shape_str(expected) + ", got " +
                         shape_str(actual));
}

int cmd_convert(const fs::path& ckpt, const fs::path& z_path, const fs::path& spk_path,
                const fs::path& out_path, std::ostream& out) {
  const Generator<float> g = load_generator<float>(ckpt);
  const auto& cfg = g.config();
  const Tensor z = load_dyt_as<float>(z_path);
  const Tensor s = load_dyt_as<float>(spk_path);
  if (z.rank() != 2 || z.dim(0) == 0 || z.dim(1) != cfg.in_dim)
    throw DimensionError("z: expected [t, " + std::to_string(cfg.in_dim) + "] with t >= 1, got " +
                         shape_str(z.shape()));
  require_extents("spk", {cfg.spk_dim}, s.shape());
  const std::size_t t = z.dim(0);
  const Tensor y = g.forward(z.reshaped({1, t, cfg.in_dim}), s.reshaped({1, cfg.spk_dim}));
  save_dyt(out_path, y.reshaped({t, cfg.out_dim}));
  out << "wrote " << out_path.string() << " " << shape_str({t, cfg.out_dim}) << "\n";
  return kExitOk;
}

int cmd_synth(const std::string& config_path, std::uint64_t seed, std::size_t speaker,
              std::size_t frames, const fs::path& out_dir, std::ostream& out) {
  ToySetup setup = ToySetup::defaults();
  if (!config_path.empty()) merge_setup(read_json_file(config_path), setup);
  setup.train.seed = seed;
  setup.validate();
  if (frames == 0) throw ConfigError("--frames must be >= 1");
  if (speaker >= setup.data.n_speakers)
    throw ConfigError("--speaker must be < " + std::to_string(setup.data.n_speakers));
  const auto& gc = setup.generator;
  const SyntheticTask<float> task(setup.data, gc.in_dim, gc.out_dim, gc.spk_dim, task_seed(seed));
  Rng rng(heldout_seed(seed));
  const Utterance<float> u = task.make_utterance(speaker, frames, rng);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  save_dyt(out_dir / "z.dyt", u.z);
  save_dyt(out_dir / "spk.dyt", task.speaker_embedding(speaker));
  save_dyt(out_dir / "target.dyt", u.x);
  out << "wrote z.dyt spk.dyt target.dyt to " << out_dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"dygan: dynamic-convolution GAN voice conversion toolkit", "dygan"};
  app.require_subcommand(1);

  std::string config_path;
  bool as_json = false;

  auto* params = app.add_subcommand("params", "Per-layer parameter counts");
  params->add_option("--config", config_path, "JSON config overlay")->check(CLI::ExistingFile);
  params->add_flag("--json", as_json, "Print JSON");

  std::size_t seeds = 5;
  double tol = gradcheck::kDefaultTolerance;
  double step = gradcheck::kDefaultStep;
  std::string layers;
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of every backward pass");
  gc->add_option("--seeds", seeds, "Seeds per layer")->capture_default_str();
  gc->add_option("--tol", tol, "Maximum relative error")->capture_default_str();
  gc->add_option("--step", step, "Central-difference step")->capture_default_str();
  gc->add_option("--layers", layers, "Comma-separated subset of layer kinds");
  gc->add_flag("--json", as_json, "Print JSON");

  BenchOptions bench_opts;
  std::string lengths = "128,256,512,1024";
  auto* bench = app.add_subcommand("bench", "Generator forward latency");
  bench->add_option("--lengths", lengths, "Comma-separated frame counts")->capture_default_str();
  bench->add_option("--reps", bench_opts.reps, "Timed repetitions")->capture_default_str();
  bench->add_option("--warmup", bench_opts.warmup, "Untimed runs first")->capture_default_str();
  bench->add_option("--threads", bench_opts.threads, "Workers across repetitions")
      ->capture_default_str();
  bench->add_option("--seed", bench_opts.seed, "Weight and input seed")->capture_default_str();
  bench->add_option("--config", config_path, "JSON config overlay")->check(CLI::ExistingFile);
  bench->add_flag("--json", as_json, "Print JSON");

  std::string out_dir;
  TrainOverrides over;
  std::uint64_t seed_value = 0;
  std::size_t epochs_value = 0;
  auto* train = app.add_subcommand("train-toy", "Train on the synthetic task");
  train->add_option("--config", config_path, "JSON config overlay")->check(CLI::ExistingFile);
  train->add_option("--out", out_dir, "Output directory")->required();
  train->add_option("--mode", over.mode, "recon_only or adversarial");
  auto* train_seed = train->add_option("--seed", seed_value, "Overrides train.seed");
  auto* train_epochs = train->add_option("--epochs", epochs_value, "Overrides train.epochs");

  std::string ckpt, z_path, spk_path, out_path;
  auto* convert = app.add_subcommand("convert", "Run a trained generator on feature files");
  convert->add_option("--checkpoint", ckpt, "Generator checkpoint")->required();
  convert->add_option("--z", z_path, "DYT1 content features [t, in_dim]")->required();
  convert->add_option("--spk", spk_path, "DYT1 speaker embedding [spk_dim]")->required();
  convert->add_option("--out", out_path, "DYT1 output [t, out_dim]")->required();

  std::uint64_t synth_seed = 0;
  std::size_t speaker = 0, frames = 200;
  auto* synth = app.add_subcommand("synth", "Write a held-out synthetic utterance");
  synth->add_option("--config", config_path, "JSON config overlay")->check(CLI::ExistingFile);
  synth->add_option("--seed", synth_seed, "Task seed (as train.seed)")->capture_default_str();
  synth->add_option("--speaker", speaker, "Speaker index")->capture_default_str();
  synth->add_option("--frames", frames, "Utterance length")->capture_default_str();
  synth->add_option("--out", out_dir, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (params->parsed()) return cmd_params(config_path, as_json, out);
    if (gc->parsed()) return cmd_gradcheck(seeds, tol, step, layers, as_json, out);
    if (bench->parsed()) return cmd_bench(config_path, lengths, bench_opts, as_json, out);
    if (train->parsed()) {
      if (*train_seed) over.seed = seed_value;
      if (*train_epochs) over.epochs = epochs_value;
      return cmd_train_toy(config_path, out_dir, over, out, err);
    }
    if (convert->parsed()) return cmd_convert(ckpt, z_path, spk_path, out_path, out);
    if (synth->parsed()) return cmd_synth(config_path, synth_seed, speaker, frames, out_dir, out);
  } catch (const CheckpointError& e) {
    err << "error: " << e.what() << "\n";
    for (const auto& p : e.problems()) err << "  " << p << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace dygan::cli
