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

#ifndef MTMT_MODEL_MLP_HPP_
#define MTMT_MODEL_MLP_HPP_

#include <span>
#include <string>
#include <vector>

#include "core/random.hpp"
#include "diff/parameters.hpp"
#include "diff/tape.hpp"

namespace mtmt::model {

using diff::Matrix;
using diff::ParameterStore;
using diff::Tape;
using diff::Var;

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
Matrix fan_in_uniform(size_t rows, size_t cols, size_t fan_in, Rng& rng);

struct DenseLayer {
  size_t weight = 0;  // out x in
  size_t bias = 0;    // 1 x out
};

// Feed-forward stack with rectifier activations between layers. The final
// layer is rectified only when `relu_last` is set. With `residual`, layers
// whose input and output widths match add their input back.
class Mlp {
 public:
  Mlp() = default;
  static Mlp create(ParameterStore& store, const std::string& prefix, size_t input,
                    std::span<const size_t> widths, bool relu_last, bool residual, Rng& rng);
  static size_t parameter_count(size_t input, std::span<const size_t> widths);

  Var forward(Tape& tape, const ParameterStore& store, Var x) const;
  size_t depth() const { return layers_.size(); }

 private:
  std::vector<DenseLayer> layers_;
  std::vector<bool> skip_;
  bool relu_last_ = false;
};

// x * W^T for a bias-free projection stored as out x in.
Var project(Tape& tape, const ParameterStore& store, Var x, size_t weight);

}  // namespace mtmt::model

#endif  // MTMT_MODEL_MLP_HPP_
