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

#ifndef MTMT_MODEL_CONFIG_HPP_
#define MTMT_MODEL_CONFIG_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

namespace mtmt::model {

enum class InteractionMode {
  kAttention,  // softmax(q K^T / sqrt(d_U)) V
  kMatMul,     // unnormalized scores q K^T / sqrt(d_U), mean-pooled over tokens
};

struct ModelConfig {
  // Zero means "take from the dataset" until resolve() runs.
  size_t feature_dim = 0;
  size_t num_tasks = 0;
  size_t num_treatments = 0;

  size_t num_experts = 4;
  std::vector<size_t> expert_hidden{64, 64};
  bool expert_residual = false;
  // The expert output is read as token_count tokens of token_width values.
  size_t token_count = 8;
  size_t token_width = 8;
  size_t embed_dim = 8;
  size_t attention_dim = 8;
  std::vector<size_t> enhancer_hidden{64, 64};

  InteractionMode interaction = InteractionMode::kAttention;
  bool use_enhancer = true;
  bool tiered = true;
  bool per_task_heads = true;
  bool single_treatment = false;
  // Incremental uplifts are reported relative to their mean over treatments,
  // so only the common part of the treated response reaches the base uplift.
  bool center_incremental = true;

  size_t representation_size() const { return token_count * token_width; }
  size_t enhancer_output_size() const;
  bool has_secondary_path() const { return tiered && !single_treatment; }
  size_t num_candidates() const { return num_treatments + 1; }

  void validate() const;
  // Fills data-derived dimensions; a nonzero configured value that disagrees
  // with the data is a schema error.
  void resolve(size_t data_feature_dim, size_t data_num_tasks, size_t data_num_treatments);
};

void to_json(nlohmann::json& j, const ModelConfig& config);
void from_json(const nlohmann::json& j, ModelConfig& config);

// Named ablation variants: each differs from the full model in one flag.
struct Variant {
  std::string name;
  ModelConfig config;
};
std::vector<Variant> ablation_variants(const ModelConfig& full);

}  // namespace mtmt::model

#endif  // MTMT_MODEL_CONFIG_HPP_
