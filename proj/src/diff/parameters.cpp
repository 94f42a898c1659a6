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

#include "diff/parameters.hpp"

#include <cstring>

#include "core/error.hpp"
#include "core/format.hpp"

namespace mtmt::diff {

size_t ParameterStore::add(std::string name, Matrix value, bool decay) {
  check(!contains(name), ErrorKind::kContract, "duplicate parameter '" + name + "'");
  const size_t index = params_.size();
  index_.emplace(name, index);
  params_.push_back(Parameter{std::move(name), std::move(value), decay});
  return index;
}

size_t ParameterStore::index_of(const std::string& name) const {
  auto it = index_.find(name);
  check(it != index_.end(), ErrorKind::kIndex, "unknown parameter '" + name + "'");
  return it->second;
}

size_t ParameterStore::scalar_count() const {
  size_t total = 0;
  for (const auto& p : params_) total += p.value.size();
  return total;
}

uint64_t ParameterStore::digest() const {
  uint64_t state = 0xcbf29ce484222325ULL;
  for (const auto& p : params_) {
    state = fnv1a({reinterpret_cast<const unsigned char*>(p.name.data()), p.name.size()}, state);
    const uint64_t dims[2] = {p.value.rows(), p.value.cols()};
    state = fnv1a({reinterpret_cast<const unsigned char*>(dims), sizeof(dims)}, state);
    const auto values = p.value.values();
    state = fnv1a({reinterpret_cast<const unsigned char*>(values.data()),
                   values.size() * sizeof(double)},
                  state);
  }
  return state;
}

void ParameterStore::fill(double value) {
  for (auto& p : params_) p.value.fill(value);
}

Gradients zero_gradients(const ParameterStore& store) {
  Gradients grads;
  grads.reserve(store.size());
  for (const auto& p : store) grads.emplace_back(p.value.rows(), p.value.cols());
  return grads;
}

}  // namespace mtmt::diff
