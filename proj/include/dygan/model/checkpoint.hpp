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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dygan/errors.hpp"
#include "dygan/model/discriminator.hpp"
#include "dygan/model/generator.hpp"

// Checkpoint container, little-endian:
//
//   "DYCK" | u32 version | u64 manifest length | manifest JSON | payload
//
// The manifest is {"version", "kind", "config", "tensors": {name: {offset,
// shape, dtype}}}; offsets are byte positions of DYT1 blocks within payload.
namespace dygan {

inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public IoError {
 public:
  CheckpointError(const std::string& what, std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

template <typename T>
void write_checkpoint(std::ostream& os, const Generator<T>& net);
template <typename T>
void write_checkpoint(std::ostream& os, const Discriminator<T>& net);

template <typename T>
Generator<T> read_generator(std::istream& is);
template <typename T>
Discriminator<T> read_discriminator(std::istream& is);

template <typename Net>
void save_checkpoint(const Net& net, const std::filesystem::path& path);
template <typename T>
Generator<T> load_generator(const std::filesystem::path& path);
template <typename T>
Discriminator<T> load_discriminator(const std::filesystem::path& path);

}  // namespace dygan
