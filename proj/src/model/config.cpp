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

#include "model/config.hpp"

#include "core/error.hpp"

namespace mtmt::model {

size_t ModelConfig::enhancer_output_size() const {
  if (!use_enhancer || enhancer_hidden.empty()) return attention_dim;
  return enhancer_hidden.back();
}

void ModelConfig::validate() const {
  auto positive = [](size_t v, const char* name) {
    check(v >= 1, ErrorKind::kConfig, std::string("model.") + name + " must be at least 1");
  };
  positive(feature_dim, "feature_dim");
  positive(num_tasks, "num_tasks");
  positive(num_treatments, "num_treatments");
  positive(num_experts, "num_experts");
  positive(token_count, "token_count");
  positive(token_width, "token_width");
  positive(embed_dim, "embed_dim");
  positive(attention_dim, "attention_dim");
  for (size_t w : expert_hidden) positive(w, "expert_hidden entries");
  for (size_t w : enhancer_hidden) positive(w, "enhancer_hidden entries");
}

void ModelConfig::resolve(size_t data_feature_dim, size_t data_num_tasks,
                          size_t data_num_treatments) {
  auto merge = [](size_t& field, size_t data_value, const char* name) {
    if (field == 0) {
      field = data_value;
    } else {
      check(field == data_value, ErrorKind::kSchema,
            std::string("model.") + name + " is " + std::to_string(field) +
                " but the data has " + std::to_string(data_value));
    }
  };
  merge(feature_dim, data_feature_dim, "feature_dim");
  merge(num_tasks, data_num_tasks, "num_tasks");
  merge(num_treatments, data_num_treatments, "num_treatments");
  validate();
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{
      {"feature_dim", c.feature_dim},
      {"num_tasks", c.num_tasks},
      {"num_treatments", c.num_treatments},
      {"num_experts", c.num_experts},
      {"expert_hidden", c.expert_hidden},
      {"expert_residual", c.expert_residual},
      {"token_count", c.token_count},
      {"token_width", c.token_width},
      {"embed_dim", c.embed_dim},
      {"attention_dim", c.attention_dim},
      {"enhancer_hidden", c.enhancer_hidden},
      {"interaction", c.interaction == InteractionMode::kAttention ? "attention" : "matmul"},
      {"use_enhancer", c.use_enhancer},
      {"tiered", c.tiered},
      {"per_task_heads", c.per_task_heads},
      {"single_treatment", c.single_treatment},
      {"center_incremental", c.center_incremental},
  };
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  c = ModelConfig{};
  c.feature_dim = j.value("feature_dim", c.feature_dim);
  c.num_tasks = j.value("num_tasks", c.num_tasks);
  c.num_treatments = j.value("num_treatments", c.num_treatments);
  c.num_experts = j.value("num_experts", c.num_experts);
  c.expert_hidden = j.value("expert_hidden", c.expert_hidden);
  c.expert_residual = j.value("expert_residual", c.expert_residual);
  c.token_count = j.value("token_count", c.token_count);
  c.token_width = j.value("token_width", c.token_width);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.attention_dim = j.value("attention_dim", c.attention_dim);
  c.enhancer_hidden = j.value("enhancer_hidden", c.enhancer_hidden);
  const std::string mode = j.value("interaction", std::string("attention"));
  check(mode == "attention" || mode == "matmul", ErrorKind::kConfig,
        "model.interaction must be attention or matmul, got '" + mode + "'");
  c.interaction = mode == "attention" ? InteractionMode::kAttention : InteractionMode::kMatMul;
  c.use_enhancer = j.value("use_enhancer", c.use_enhancer);
  c.tiered = j.value("tiered", c.tiered);
  c.per_task_heads = j.value("per_task_heads", c.per_task_heads);
  c.single_treatment = j.value("single_treatment", c.single_treatment);
  c.center_incremental = j.value("center_incremental", c.center_incremental);
}

std::vector<Variant> ablation_variants(const ModelConfig& full) {
  std::vector<Variant> variants;
  variants.push_back({"full", full});
  ModelConfig no_interaction = full;
  no_interaction.interaction = InteractionMode::kMatMul;
  variants.push_back({"no_interaction", no_interaction});
  ModelConfig no_enhancer = full;
  no_enhancer.use_enhancer = false;
  variants.push_back({"no_enhancer", no_enhancer});
  ModelConfig untiered = full;
  untiered.tiered = false;
  variants.push_back({"untiered", untiered});
  ModelConfig joint_task = full;
  joint_task.per_task_heads = false;
  variants.push_back({"joint_task", joint_task});
  return variants;
}

}  // namespace mtmt::model
