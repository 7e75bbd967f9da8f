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

#include "dygan/training/data.hpp"

#include <algorithm>
#include <cmath>

#include "dygan/kernels.hpp"

namespace dygan {

std::size_t crop_start(std::size_t t, std::size_t frames, Rng& rng) {
  return t > frames ? rng.index(t - frames + 1) : 0;
}

template <typename T>
BasicTensor<T> crop_at(const BasicTensor<T>& utterance, std::size_t start, std::size_t frames) {
  require_rank(utterance.shape(), 2, "crop");
  const std::size_t t = utterance.dim(0), c = utterance.dim(1);
  BasicTensor<T> out({frames, c});
  if (start < t) {
    const std::size_t n = std::min(frames, t - start);
    std::copy_n(utterance.data() + start * c, n * c, out.data());
  }
  return out;
}

template <typename T>
BasicTensor<T> crop_segment(const BasicTensor<T>& utterance, Rng& rng, std::size_t frames) {
  require_rank(utterance.shape(), 2, "crop_segment");
  return crop_at(utterance, crop_start(utterance.dim(0), frames, rng), frames);
}

void SyntheticConfig::validate() const {
  if (n_speakers < 2) throw ConfigError("data.n_speakers must be >= 2");
  if (utterances_per_speaker == 0) throw ConfigError("data.utterances_per_speaker must be >= 1");
  if (min_frames == 0 || max_frames < min_frames)
    throw ConfigError("data: need 1 <= min_frames <= max_frames");
  if (!(scale_min > 0.0) || scale_max < scale_min)
    throw ConfigError("data: need 0 < scale_min <= scale_max");
}

template <typename T>
SyntheticTask<T>::SyntheticTask(const SyntheticConfig& config, std::size_t in_dim,
                                std::size_t out_dim, std::size_t spk_dim, std::uint64_t seed)
    : config_(config), in_dim_(in_dim), out_dim_(out_dim), spk_dim_(spk_dim) {
  config.validate();
  Rng rng(seed);
  mapping_ = BasicTensor<T>::randn({in_dim, out_dim}, rng, 1.0 / std::sqrt(double(in_dim)));
  embeddings_ = BasicTensor<T>::randn({config.n_speakers, spk_dim}, rng);
  const std::size_t n = config.n_speakers;
  for (std::size_t i = 0; i < n; ++i)
    scales_.push_back(config.scale_min +
                      (config.scale_max - config.scale_min) * double(i) / double(n - 1));
}

template <typename T>
BasicTensor<T> SyntheticTask<T>::speaker_embedding(std::size_t speaker) const {
  if (speaker >= config_.n_speakers) throw ConfigError("unknown synthetic speaker");
  BasicTensor<T> e({spk_dim_});
  std::copy_n(embeddings_.data() + speaker * spk_dim_, spk_dim_, e.data());
  return e;
}

template <typename T>
BasicTensor<T> SyntheticTask<T>::target(const BasicTensor<T>& z, std::size_t speaker) const {
  require_rank(z.shape(), 2, "synthetic content");
  if (z.dim(1) != in_dim_) throw DimensionError("synthetic content " + shape_str(z.shape()));
  BasicTensor<T> x = matmul(z, mapping_);
  x *= static_cast<T>(speaker_scale(speaker));
  return x;
}

template <typename T>
Utterance<T> SyntheticTask<T>::make_utterance(std::size_t speaker, std::size_t frames,
                                              Rng& rng) const {
  Utterance<T> u;
  u.speaker = speaker;
  u.z = BasicTensor<T>::randn({frames, in_dim_}, rng);
  u.x = target(u.z, speaker);
  return u;
}

template <typename T>
std::vector<Utterance<T>> SyntheticTask<T>::make_dataset(Rng& rng) const {
  std::vector<Utterance<T>> out;
  const std::size_t span = config_.max_frames - config_.min_frames + 1;
  for (std::size_t s = 0; s < config_.n_speakers; ++s)
    for (std::size_t u = 0; u < config_.utterances_per_speaker; ++u)
      out.push_back(make_utterance(s, config_.min_frames + rng.index(span), rng));
  return out;
}

template BasicTensor<float> crop_at<float>(const BasicTensor<float>&, std::size_t, std::size_t);
template BasicTensor<double> crop_at<double>(const BasicTensor<double>&, std::size_t,
                                             std::size_t);
template BasicTensor<float> crop_segment<float>(const BasicTensor<float>&, Rng&, std::size_t);
template BasicTensor<double> crop_segment<double>(const BasicTensor<double>&, Rng&, std::size_t);
template class SyntheticTask<float>;
template class SyntheticTask<double>;

}  // namespace dygan
