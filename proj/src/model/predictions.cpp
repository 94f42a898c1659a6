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

#include "model/predictions.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace mtmt::model {

Predictions Predictions::allocate(size_t n, size_t num_tasks, size_t num_treatments) {
  Predictions p;
  p.size = n;
  p.num_tasks = num_tasks;
  p.num_treatments = num_treatments;
  p.natural.assign(n * num_tasks, 0.0);
  p.base.assign(n * num_tasks, 0.0);
  p.incremental.assign(n * num_tasks * num_treatments, 0.0);
  p.gamma.assign(n * num_tasks * (num_treatments + 1), 0.0);
  return p;
}

Predictions Predictions::from_oracle(const data::OracleIte& oracle) {
  Predictions p = allocate(oracle.size(), oracle.num_tasks, oracle.num_treatments);
  p.has_tiers = true;
  for (size_t i = 0; i < p.size; ++i) {
    for (size_t k = 0; k < p.num_tasks; ++k) {
      p.base_at(i, k) = oracle.base(i, k);
      for (size_t t = 0; t < p.num_treatments; ++t) {
        p.incremental_at(i, k, t) = oracle.incremental_at(i, k, t);
        p.gamma_at(i, k, t + 1) = oracle.base(i, k) + oracle.incremental_at(i, k, t);
      }
    }
  }
  return p;
}

void Predictions::place(const Predictions& other, size_t offset) {
  check(other.num_tasks == num_tasks && other.num_treatments == num_treatments &&
            offset + other.size <= size,
        ErrorKind::kShape, "prediction block does not fit");
  auto copy = [&](const std::vector<double>& src, std::vector<double>& dst, size_t stride) {
    std::copy(src.begin(), src.end(), dst.begin() + static_cast<std::ptrdiff_t>(offset * stride));
  };
  copy(other.natural, natural, num_tasks);
  copy(other.base, base, num_tasks);
  copy(other.incremental, incremental, num_tasks * num_treatments);
  copy(other.gamma, gamma, num_tasks * num_candidates());
  has_natural_response = other.has_natural_response;
  has_tiers = other.has_tiers;
}

}  // namespace mtmt::model
