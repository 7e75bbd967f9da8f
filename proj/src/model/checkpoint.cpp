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

#include "dygan/model/checkpoint.hpp"

#include <array>
#include <fstream>
#include <map>
#include <sstream>

#include "dygan/model/config_json.hpp"
#include "dygan/tensor_io.hpp"

namespace dygan {

using nlohmann::json;

namespace {

constexpr std::array<char, 4> kMagic = {'D', 'Y', 'C', 'K'};

template <typename U>
void put_le(std::ostream& os, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <typename U>
U get_le(std::istream& is) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw IoError("checkpoint: truncated header");
    v |= static_cast<U>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

const char* kind_of(const GeneratorConfig&) { return "generator"; }
const char* kind_of(const DiscriminatorConfig&) { return "discriminator"; }

template <typename Net>
void write_impl(std::ostream& os, const Net& net) {
  std::ostringstream payload;
  json tensors = json::object();
  net.for_each_param([&](const std::string& name, const auto& t) {
    const auto offset = static_cast<std::uint64_t>(payload.tellp());
    write_dyt(payload, t);
    using V = typename std::decay_t<decltype(t)>::value_type;
    tensors[name] = {{"offset", offset}, {"shape", t.shape()}, {"dtype", dtype_name(dtype_of<V>())}};
  });
  json manifest = {{"version", kCheckpointVersion},
                   {"kind", kind_of(net.config())},
                   {"config", net.config()},
                   {"tensors", std::move(tensors)}};
  const std::string text = manifest.dump();
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(os, kCheckpointVersion);
  put_le<std::uint64_t>(os, text.size());
  os << text;
  const std::string blob = payload.str();
  os.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!os) throw IoError("checkpoint: write failed");
}

struct RawCheckpoint {
  json manifest;
  std::string payload;
};

RawCheckpoint read_raw(std::istream& is, const char* expected_kind) {
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw IoError("checkpoint: bad magic bytes");
  const auto version = get_le<std::uint32_t>(is);
  if (version != kCheckpointVersion)
    throw CheckpointError("checkpoint: unsupported version",
                          {"version " + std::to_string(version) + " (expected " +
                           std::to_string(kCheckpointVersion) + ")"});
  const auto len = get_le<std::uint64_t>(is);
  std::string text(len, '\0');
  is.read(text.data(), static_cast<std::streamsize>(len));
  if (!is) throw IoError("checkpoint: truncated manifest");
  RawCheckpoint raw;
  try {
    raw.manifest = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("checkpoint: malformed manifest: ") + e.what());
  }
  raw.payload.assign(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
  if (raw.manifest.value("kind", "") != expected_kind)
    throw CheckpointError("checkpoint: wrong model kind",
                          {"kind \"" + raw.manifest.value("kind", "") + "\" (expected \"" +
                           expected_kind + "\")"});
  return raw;
}

template <typename Net>
void fill_params(Net& net, const RawCheckpoint& raw) {
  const json& entries = raw.manifest.at("tensors");
  std::vector<std::string> problems;
  std::map<std::string, bool> seen;
  for (const auto& [name, _] : entries.items()) seen[name] = false;

  net.for_each_param([&](const std::string& name, auto& t) {
    using V = typename std::decay_t<decltype(t)>::value_type;
    auto it = entries.find(name);
    if (it == entries.end()) {
      problems.push_back("missing entry \"" + name + "\"");
      return;
    }
    seen[name] = true;
    const Shape shape = it->at("shape").template get<Shape>();
    if (shape != t.shape()) {
      problems.push_back("shape mismatch for \"" + name + "\": stored " + shape_str(shape) +
                         ", expected " + shape_str(t.shape()));
      return;
    }
    const auto offset = it->at("offset").template get<std::uint64_t>();
    if (offset >= raw.payload.size()) {
      problems.push_back("offset out of range for \"" + name + "\"");
      return;
    }
    std::istringstream block(raw.payload.substr(offset));
    AnyTensor stored = read_dyt(block);
    if (shape_of(stored) != shape) {
      problems.push_back("payload shape for \"" + name + "\" disagrees with manifest");
      return;
    }
    t = convert_to<V>(stored);
  });
  for (const auto& [name, used] : seen)
    if (!used) problems.push_back("unexpected entry \"" + name + "\"");
  if (!problems.empty()) {
    std::string msg = "checkpoint does not match the model:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw CheckpointError(msg, std::move(problems));
  }
}

}  // namespace

CheckpointError::CheckpointError(const std::string& what, std::vector<std::string> problems)
    : IoError(what), problems_(std::move(problems)) {}

template <typename T>
void write_checkpoint(std::ostream& os, const Generator<T>& net) {
  write_impl(os, net);
}
template <typename T>
void write_checkpoint(std::ostream& os, const Discriminator<T>& net) {
  write_impl(os, net);
}

template <typename T>
Generator<T> read_generator(std::istream& is) {
  RawCheckpoint raw = read_raw(is, "generator");
  GeneratorConfig config;
  try {
    merge_json(raw.manifest.at("config"), config);
  } catch (const json::exception& e) {
    throw IoError(std::string("checkpoint: bad config: ") + e.what());
  }
  Generator<T> net(config);
  fill_params(net, raw);
  return net;
}

template <typename T>
Discriminator<T> read_discriminator(std::istream& is) {
  RawCheckpoint raw = read_raw(is, "discriminator");
  DiscriminatorConfig config;
  try {
    merge_json(raw.manifest.at("config"), config);
  } catch (const json::exception& e) {
    throw IoError(std::string("checkpoint: bad config: ") + e.what());
  }
  Discriminator<T> net(config);
  fill_params(net, raw);
  return net;
}

template <typename Net>
void save_checkpoint(const Net& net, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_checkpoint(os, net);
}

template <typename T>
Generator<T> load_generator(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_generator<T>(is);
}

template <typename T>
Discriminator<T> load_discriminator(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_discriminator<T>(is);
}

#define DYGAN_INSTANTIATE(T)                                                          \
  template void write_checkpoint<T>(std::ostream&, const Generator<T>&);             \
  template void write_checkpoint<T>(std::ostream&, const Discriminator<T>&);         \
  template Generator<T> read_generator<T>(std::istream&);                            \
  template Discriminator<T> read_discriminator<T>(std::istream&);                    \
  template void save_checkpoint<Generator<T>>(const Generator<T>&,                   \
                                              const std::filesystem::path&);         \
  template void save_checkpoint<Discriminator<T>>(const Discriminator<T>&,           \
                                                  const std::filesystem::path&);     \
  template Generator<T> load_generator<T>(const std::filesystem::path&);             \
  template Discriminator<T> load_discriminator<T>(const std::filesystem::path&);

DYGAN_INSTANTIATE(float)
DYGAN_INSTANTIATE(double)

#undef DYGAN_INSTANTIATE

}  // namespace dygan
