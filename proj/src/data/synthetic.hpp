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

#ifndef MTMT_DATA_SYNTHETIC_HPP_
#define MTMT_DATA_SYNTHETIC_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "data/dataset.hpp"
#include "json.hpp"

namespace mtmt::data {

enum class EffectFunction {
  kConstant,    // magnitude
  kLinear,      // magnitude * (1 + x_j / 2)
  kSignSwitch,  // +magnitude when x_j >= 0, -magnitude otherwise
};

struct EffectSpec {
  EffectFunction function = EffectFunction::kConstant;
  size_t feature = 0;
  double magnitude = 0.0;

  double evaluate(std::span<const double> x) const;
};

enum class ResponseFunction { kConstant, kLinear, kNonlinear };
enum class OutcomeKind { kBinary, kContinuous };

// Parameters of a randomized trial with planted heterogeneous effects.
struct SyntheticSpec {
  size_t num_features = 8;
  // The trailing `num_discrete` features are uniform categorical codes.
  size_t num_discrete = 0;
  size_t discrete_levels = 4;
  size_t num_tasks = 2;
  size_t num_treatments = 2;
  size_t num_samples = 50000;
  double treatment_probability = 0.5;
  // Empty means uniform over the secondary treatments.
  std::vector<double> secondary_probabilities;
  EffectSpec base_effect{EffectFunction::kLinear, 0, 0.10};
  // One per secondary treatment.
  std::vector<EffectSpec> incremental_effects{
      {EffectFunction::kSignSwitch, 1, 0.02},
      {EffectFunction::kSignSwitch, 2, 0.02},
  };
  ResponseFunction natural_response = ResponseFunction::kNonlinear;
  double response_level = 0.3;
  // Per-task multiplier on every planted effect. Empty means all 1.
  std::vector<double> task_effect_scales;
  OutcomeKind outcome = OutcomeKind::kBinary;
  double noise_sigma = 0.1;

  void validate() const;
  double task_scale(size_t task) const;
  double natural_response_value(std::span<const double> x, size_t task) const;
  DatasetSchema schema() const;

  // Null effect: every planted magnitude zero.
  static SyntheticSpec null_effect(size_t num_samples);
  // Constant base effect, no incremental effects.
  static SyntheticSpec constant_effect(double magnitude, size_t num_samples);
};

void to_json(nlohmann::json& j, const SyntheticSpec& spec);
void from_json(const nlohmann::json& j, SyntheticSpec& spec);

struct SyntheticData {
  Dataset dataset;
  OracleIte oracle;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec, uint64_t seed);

}  // namespace mtmt::data

#endif  // MTMT_DATA_SYNTHETIC_HPP_
