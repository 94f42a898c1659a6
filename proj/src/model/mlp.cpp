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

#include "model/mlp.hpp"

#include <algorithm>
#include <cmath>

namespace mtmt::model {

Matrix fan_in_uniform(size_t rows, size_t cols, size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<size_t>(fan_in, 1)));
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(-bound, bound);
  return m;
}

Mlp Mlp::create(ParameterStore& store, const std::string& prefix, size_t input,
                std::span<const size_t> widths, bool relu_last, bool residual, Rng& rng) {
  Mlp mlp;
  mlp.relu_last_ = relu_last;
  size_t in = input;
  for (size_t l = 0; l < widths.size(); ++l) {
    const size_t out = widths[l];
    const std::string name = prefix + ".layer" + std::to_string(l);
    DenseLayer layer;
    layer.weight = store.add(name + ".weight", fan_in_uniform(out, in, in, rng));
    layer.bias = store.add(name + ".bias", fan_in_uniform(1, out, in, rng));
    mlp.layers_.push_back(layer);
    const bool last = l + 1 == widths.size();
    mlp.skip_.push_back(residual && in == out && (!last || relu_last));
    in = out;
  }
  return mlp;
}

size_t Mlp::parameter_count(size_t input, std::span<const size_t> widths) {
  size_t total = 0;
  size_t in = input;
  for (size_t out : widths) {
    total += in * out + out;
    in = out;
  }
  return total;
}

Var Mlp::forward(Tape& tape, const ParameterStore& store, Var x) const {
  Var h = x;
  for (size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    Var z = add_row_vector(matmul_nt(h, tape.parameter(store, layer.weight)),
                           tape.parameter(store, layer.bias));
    const bool last = l + 1 == layers_.size();
    if (!last || relu_last_) z = relu(z);
    if (skip_[l]) z = add(z, h);
    h = z;
  }
  return h;
}

Var project(Tape& tape, const ParameterStore& store, Var x, size_t weight) {
  return matmul_nt(x, tape.parameter(store, weight));
}

}  // namespace mtmt::model
