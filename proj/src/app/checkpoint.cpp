/*
 * Copyright 2026 The MTMT Uplift Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "app/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "core/error.hpp"
#include "core/format.hpp"
#include "model/config.hpp"
#include "train/trainer.hpp"

namespace mtmt::app {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

constexpr char kMagic[8] = {'M', 'T', 'M', 'T', 'C', 'K', 'P', 'T'};

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

void put_string(std::string& out, const std::string& s) {
  put<uint64_t>(out, s.size());
  out.append(s);
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string get_string() {
    const uint64_t n = get<uint64_t>();
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void get_doubles(std::span<double> out) {
    need(out.size() * sizeof(double));
    std::memcpy(out.data(), bytes_.data() + pos_, out.size() * sizeof(double));
    pos_ += out.size() * sizeof(double);
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(uint64_t n) const {
    check(n <= bytes_.size() - pos_, ErrorKind::kSchema, "checkpoint is truncated");
  }

  const std::string& bytes_;
  size_t pos_ = 0;
};

}  // namespace

std::string encode_checkpoint(const model::UpliftLearner& learner, const nlohmann::json& meta) {
  std::string out(kMagic, sizeof(kMagic));
  put<uint32_t>(out, kCheckpointVersion);
  put<uint32_t>(out, static_cast<uint32_t>(learner.method()));
  put_string(out, learner.config_json().dump());
  put_string(out, meta.dump());
  const diff::ParameterStore& store = learner.parameters();
  put<uint64_t>(out, store.size());
  for (const auto& p : store) {
    put_string(out, p.name);
    put<uint64_t>(out, p.value.rows());
    put<uint64_t>(out, p.value.cols());
    out.append(reinterpret_cast<const char*>(p.value.values().data()),
               p.value.size() * sizeof(double));
  }
  return out;
}

void save_checkpoint(const std::string& path, const model::UpliftLearner& learner,
                     const nlohmann::json& meta) {
  const std::string bytes = encode_checkpoint(learner, meta);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  check(out.good(), ErrorKind::kIo, "cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  check(out.good(), ErrorKind::kIo, "write to '" + path + "' failed");
}

LoadedCheckpoint decode_checkpoint(const std::string& bytes) {
  check(bytes.size() >= sizeof(kMagic) && std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) == 0,
        ErrorKind::kSchema, "not a checkpoint file");
  Reader in(bytes);
  for (size_t i = 0; i < sizeof(kMagic); ++i) in.get<char>();
  const uint32_t version = in.get<uint32_t>();
  check(version == kCheckpointVersion, ErrorKind::kSchema,
        "unsupported checkpoint version " + std::to_string(version));
  const uint32_t method_tag = in.get<uint32_t>();
  check(method_tag <= static_cast<uint32_t>(model::Method::kTLearner), ErrorKind::kSchema,
        "unknown method tag in checkpoint");
  const auto method = static_cast<model::Method>(method_tag);

  model::ModelConfig config;
  LoadedCheckpoint loaded;
  try {
    config = nlohmann::json::parse(in.get_string()).get<model::ModelConfig>();
    loaded.meta = nlohmann::json::parse(in.get_string());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kSchema, std::string("checkpoint metadata is malformed: ") + e.what());
  }
  loaded.learner = train::make_learner(method, config, 0);
  diff::ParameterStore& store = loaded.learner->parameters();

  const uint64_t count = in.get<uint64_t>();
  check(count == store.size(), ErrorKind::kSchema,
        "checkpoint holds " + std::to_string(count) + " tensors, configuration implies " +
            std::to_string(store.size()));
  for (uint64_t t = 0; t < count; ++t) {
    const std::string name = in.get_string();
    const uint64_t rows = in.get<uint64_t>();
    const uint64_t cols = in.get<uint64_t>();
    check(store.contains(name), ErrorKind::kSchema, "unexpected tensor '" + name + "'");
    diff::Matrix& value = store.value(name);
    check(value.rows() == rows && value.cols() == cols, ErrorKind::kSchema,
          "tensor '" + name + "' has shape " + diff::shape_string(rows, cols) + ", expected " +
              value.shape_string());
    in.get_doubles(value.values());
  }
  check(in.done(), ErrorKind::kSchema, "trailing bytes after checkpoint tensors");
  loaded.learner->mark_fitted();
  return loaded;
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  return decode_checkpoint(read_file(path));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  check(in.good(), ErrorKind::kIo, "cannot open '" + path + "' for reading");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

uint64_t file_digest(const std::string& path) {
  const std::string bytes = read_file(path);
  return fnv1a(std::span(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()));
}

}  // namespace mtmt::app
