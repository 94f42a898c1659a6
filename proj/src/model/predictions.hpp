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

#ifndef MTMT_MODEL_PREDICTIONS_HPP_
#define MTMT_MODEL_PREDICTIONS_HPP_

#include <cstddef>
#include <vector>

#include "data/dataset.hpp"

namespace mtmt::model {

// Batch scoring output. Candidate 0 is "no treatment" (overall uplift 0);
// candidate c >= 1 assigns secondary treatment c - 1.
struct Predictions {
  size_t size = 0;
  size_t num_tasks = 0;
  size_t num_treatments = 0;
  bool has_natural_response = false;
  // False for learners that do not split uplift into base and incremental.
  bool has_tiers = false;
  // False when the learner has no per-treatment incremental output.
  bool has_incremental = true;
  std::vector<double> natural;      // size x tasks
  std::vector<double> base;         // size x tasks
  std::vector<double> incremental;  // size x tasks x treatments
  std::vector<double> gamma;        // size x tasks x (treatments + 1)

  static Predictions allocate(size_t n, size_t num_tasks, size_t num_treatments);
  // Ranks by the true effects: gamma = base* + incremental*.
  static Predictions from_oracle(const data::OracleIte& oracle);

  size_t num_candidates() const { return num_treatments + 1; }
  double& natural_at(size_t i, size_t k) { return natural[i * num_tasks + k]; }
  double natural_at(size_t i, size_t k) const { return natural[i * num_tasks + k]; }
  double& base_at(size_t i, size_t k) { return base[i * num_tasks + k]; }
  double base_at(size_t i, size_t k) const { return base[i * num_tasks + k]; }
  double& incremental_at(size_t i, size_t k, size_t t) {
    return incremental[(i * num_tasks + k) * num_treatments + t];
  }
  double incremental_at(size_t i, size_t k, size_t t) const {
    return incremental[(i * num_tasks + k) * num_treatments + t];
  }
  double& gamma_at(size_t i, size_t k, size_t candidate) {
    return gamma[(i * num_tasks + k) * num_candidates() + candidate];
  }
  double gamma_at(size_t i, size_t k, size_t candidate) const {
    return gamma[(i * num_tasks + k) * num_candidates() + candidate];
  }

  // Copies rows [0, other.size) into rows starting at `offset`.
  void place(const Predictions& other, size_t offset);
};

}  // namespace mtmt::model

#endif  // MTMT_MODEL_PREDICTIONS_HPP_
