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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dygan/tensor.hpp"

namespace dygan {

inline constexpr std::size_t kSegmentFrames = 128;

// Start frame of a training crop: uniform in [0, t - frames] when t > frames,
// otherwise 0 (no draw is consumed).
std::size_t crop_start(std::size_t t, std::size_t frames, Rng& rng);

// Rows [start, start + frames) of a [t, c] utterance; rows past the end are zero.
template <typename T>
BasicTensor<T> crop_at(const BasicTensor<T>& utterance, std::size_t start, std::size_t frames);

template <typename T>
BasicTensor<T> crop_segment(const BasicTensor<T>& utterance, Rng& rng,
                            std::size_t frames = kSegmentFrames);

struct SyntheticConfig {
  std::size_t n_speakers = 2;
  std::size_t utterances_per_speaker = 32;
  std::size_t min_frames = 96;
  std::size_t max_frames = 256;
  double scale_min = 0.9;
  double scale_max = 1.1;

  void validate() const;
};

template <typename T>
struct Utterance {
  std::size_t speaker = 0;
  BasicTensor<T> z;  // [t, in_dim]
  BasicTensor<T> x;  // [t, out_dim]
};

/// Stand-in for (content features, speaker, mel) triples. Content frames are
/// standard normal; the target mel is a fixed random linear map of the
/// content scaled by a per-speaker gain:
///
///   x[j] = scale[spk] * z[j] A,   A ~ Normal(0, 1/in_dim)
///
/// so every speaker is reachable only through its embedding.
template <typename T>
class SyntheticTask {
 public:
  SyntheticTask(const SyntheticConfig& config, std::size_t in_dim, std::size_t out_dim,
                std::size_t spk_dim, std::uint64_t seed);

  const SyntheticConfig& config() const { return config_; }
  const BasicTensor<T>& mapping() const { return mapping_; }
  const BasicTensor<T>& speaker_embeddings() const { return embeddings_; }  // [n, spk_dim]
  BasicTensor<T> speaker_embedding(std::size_t speaker) const;             // [spk_dim]
  double speaker_scale(std::size_t speaker) const { return scales_.at(speaker); }

  BasicTensor<T> target(const BasicTensor<T>& z, std::size_t speaker) const;
  Utterance<T> make_utterance(std::size_t speaker, std::size_t frames, Rng& rng) const;
  // utterances_per_speaker utterances per speaker with lengths uniform in
  // [min_frames, max_frames].
  std::vector<Utterance<T>> make_dataset(Rng& rng) const;

 private:
  SyntheticConfig config_;
  std::size_t in_dim_, out_dim_, spk_dim_;
  BasicTensor<T> mapping_;
  BasicTensor<T> embeddings_;
  std::vector<double> scales_;
};

}  // namespace dygan
