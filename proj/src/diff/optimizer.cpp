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

#include "diff/optimizer.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "core/error.hpp"

namespace mtmt::diff {

double cosine_learning_rate(double base_rate, size_t step, size_t period) {
  if (period == 0 || step >= period) return 0.0;
  const double phase = std::numbers::pi * static_cast<double>(step) / static_cast<double>(period);
  return 0.5 * base_rate * (1.0 + std::cos(phase));
}

AdamW::AdamW(const ParameterStore& store, AdamWOptions options) : options_(options) {
  check(options_.learning_rate > 0.0, ErrorKind::kConfig, "learning rate must be positive");
  check(options_.weight_decay >= 0.0, ErrorKind::kConfig, "weight decay must be non-negative");
  first_moment_ = zero_gradients(store);
  second_moment_ = zero_gradients(store);
}

double AdamW::current_learning_rate() const {
  return cosine_learning_rate(options_.learning_rate, step_, options_.schedule_period);
}

void AdamW::step(ParameterStore& store, const Gradients& grads) {
  check(grads.size() == store.size() && first_moment_.size() == store.size(),
        ErrorKind::kShape,
        "optimizer state covers " + std::to_string(first_moment_.size()) +
            " parameters, store has " + std::to_string(store.size()) + ", gradients " +
            std::to_string(grads.size()));
  const double rate = current_learning_rate();
  const double t = static_cast<double>(step_ + 1);
  const double correction1 = 1.0 - std::pow(options_.beta1, t);
  const double correction2 = 1.0 - std::pow(options_.beta2, t);
  for (size_t i = 0; i < store.size(); ++i) {
    Parameter& p = store.at(i);
    check(grads[i].same_shape(p.value), ErrorKind::kShape,
          "gradient " + grads[i].shape_string() + " for parameter '" + p.name + "' " +
              p.value.shape_string());
    auto w = p.value.values();
    const auto g = grads[i].values();
    auto m = first_moment_[i].values();
    auto v = second_moment_[i].values();
    const double decay = p.decay ? rate * options_.weight_decay : 0.0;
    for (size_t j = 0; j < w.size(); ++j) {
      w[j] -= decay * w[j];
      m[j] = options_.beta1 * m[j] + (1.0 - options_.beta1) * g[j];
      v[j] = options_.beta2 * v[j] + (1.0 - options_.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      w[j] -= rate * m_hat / (std::sqrt(v_hat) + options_.epsilon);
    }
  }
  ++step_;
}

}  // namespace mtmt::diff
