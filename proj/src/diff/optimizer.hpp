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

#ifndef MTMT_DIFF_OPTIMIZER_HPP_
#define MTMT_DIFF_OPTIMIZER_HPP_

#include <cstddef>
#include <vector>

#include "diff/parameters.hpp"

namespace mtmt::diff {

struct AdamWOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
  // Steps over which the rate anneals from learning_rate to 0.
  size_t schedule_period = 1;
};

// Cosine-annealed rate at `step`; clamps to 0 from `period` onwards.
double cosine_learning_rate(double base_rate, size_t step, size_t period);

// AdamW with decoupled weight decay. Parameters flagged `decay = false` skip
// the decay term.
class AdamW {
 public:
  AdamW(const ParameterStore& store, AdamWOptions options);

  const AdamWOptions& options() const { return options_; }
  size_t step_count() const { return step_; }
  double current_learning_rate() const;

  void step(ParameterStore& store, const Gradients& grads);

 private:
  AdamWOptions options_;
  size_t step_ = 0;
  std::vector<Matrix> first_moment_;
  std::vector<Matrix> second_moment_;
};

}  // namespace mtmt::diff

#endif  // MTMT_DIFF_OPTIMIZER_HPP_
