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

#ifndef MTMT_DIFF_PARAMETERS_HPP_
#define MTMT_DIFF_PARAMETERS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "diff/matrix.hpp"

namespace mtmt::diff {

struct Parameter {
  std::string name;
  Matrix value;
  // Excluded from decoupled weight decay when false (embedding tables).
  bool decay = true;
};

// Ordered, name-addressable set of trainable matrices. Insertion order is the
// canonical order for checkpoints, digests and optimizer state.
class ParameterStore {
 public:
  size_t add(std::string name, Matrix value, bool decay = true);

  size_t size() const { return params_.size(); }
  const Parameter& at(size_t index) const { return params_[index]; }
  Parameter& at(size_t index) { return params_[index]; }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  size_t index_of(const std::string& name) const;
  Matrix& value(const std::string& name) { return params_[index_of(name)].value; }
  const Matrix& value(const std::string& name) const { return params_[index_of(name)].value; }

  size_t scalar_count() const;
  // FNV-1a over names, shapes and raw value bytes.
  uint64_t digest() const;
  void fill(double value);

  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<Parameter> params_;
  std::map<std::string, size_t> index_;
};

// Gradient map aligned index-for-index with a ParameterStore.
using Gradients = std::vector<Matrix>;

Gradients zero_gradients(const ParameterStore& store);

}  // namespace mtmt::diff

#endif  // MTMT_DIFF_PARAMETERS_HPP_
