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

#ifndef MTMT_MODEL_MTMT_MODEL_HPP_
#define MTMT_MODEL_MTMT_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "model/config.hpp"
#include "model/learner.hpp"
#include "model/mlp.hpp"

namespace mtmt::model {

enum class Path { kBase, kSecondary };

// Scores for one user on one task.
struct TaskScores {
  double natural_response = 0.0;
  double base_uplift = 0.0;
  // One per secondary treatment; empty for the single-treatment variant.
  std::vector<double> incremental_uplifts;
  // Overall uplift per candidate; candidate 0 ("no treatment") is 0.
  std::vector<double> gamma;
};

struct UpliftScores {
  std::vector<TaskScores> tasks;
};

struct HeadOutputs {
  double base = 0.0;
  std::optional<double> incremental;
};

struct Candidate {
  size_t index = 0;  // 0 = no treatment, c = secondary treatment c - 1
  std::vector<double> gamma;  // per task
  size_t rank = 0;            // 1-based
};

// Predicted outcome: y0 + base + incremental when treated, y0 otherwise.
double compose_response(double natural, double base_uplift, double incremental_uplift,
                        bool treated);
// Overall uplift: base + incremental * 1{treated}.
double overall_uplift(double base_uplift, double incremental_uplift, bool treated);

// Column `index` of an embedding table, computed as table * one_hot(index).
std::vector<double> embed_treatment(size_t index, const Matrix& table);

// Ranks candidates descending by gamma on `rank_task`; ties go to the lower
// candidate index.
std::vector<Candidate> rank_candidates(std::vector<Candidate> candidates, size_t rank_task);

// Multi-gate mixture-of-experts user encoder, treatment embeddings, base and
// secondary user-treatment interaction paths, enhancers, and per-task heads.
//
// Parameter names:
//   gate.k<k>                           n x d
//   expert<j>.layer<l>.{weight,bias}    feed-forward expert stacks
//   embed.base                          v x 2
//   embed.secondary                     v x m       (tiered, multi-treatment)
//   path.<p>.{query,key,value}          d_U x v, d_U x w, d_U x w
//   enhancer.<p>.layer<l>.{weight,bias} (use_enhancer)
//   head.natural.k<k>                   1 x (L*w)
//   head.base.<k|shared>                1 x h       (tiered)
//   head.incremental.<k|shared>         1 x h       (tiered, multi-treatment)
//   head.joint.<k|shared>               m x h       (untiered)
class MtmtModel final : public UpliftLearner {
 public:
  MtmtModel(ModelConfig config, uint64_t seed);

  static size_t parameter_count(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  Method method() const override { return Method::kMtmt; }
  size_t feature_dim() const override { return config_.feature_dim; }
  size_t num_tasks() const override { return config_.num_tasks; }
  size_t num_treatments() const override { return config_.num_treatments; }
  nlohmann::json config_json() const override { return config_; }
  const diff::ParameterStore& parameters() const override { return params_; }
  diff::ParameterStore& parameters() override { return params_; }

  // Single-user operations.
  std::vector<double> gate_weights(std::span<const double> x, size_t task) const;
  // One L x w token matrix per task.
  std::vector<Matrix> encode_user(std::span<const double> x) const;
  std::vector<double> embed_base(int treated) const;
  std::vector<double> embed_secondary(size_t treatment) const;
  double natural_response(const Matrix& representation, size_t task) const;
  std::vector<double> interact(std::span<const double> embedding, const Matrix& representation,
                               Path path) const;
  // Attention weights over the L tokens for one query (attention mode only).
  std::vector<double> attention_weights(std::span<const double> embedding,
                                        const Matrix& representation, Path path) const;
  // Tiered heads. `psi_secondary` is ignored by the single-treatment variant.
  // The incremental output is uncentered; forward_full subtracts the mean over
  // treatments when center_incremental is set.
  HeadOutputs uplift_heads(std::span<const double> psi_base,
                           std::optional<std::span<const double>> psi_secondary,
                           size_t task) const;
  // Untiered variant: one merged uplift per treatment from the base path.
  std::vector<double> joint_uplifts(std::span<const double> psi_base, size_t task) const;

  UpliftScores forward_full(std::span<const double> x) const;
  std::vector<Candidate> score_candidates(std::span<const double> x, size_t rank_task) const;

  diff::Var batch_loss(diff::Tape& tape, const data::Batch& batch,
                       std::span<const double> task_weights) const override;
  Predictions predict(const Matrix& features) const override;

 private:
  struct InteractionPath {
    size_t query = 0;
    size_t key = 0;
    size_t value = 0;
    size_t table = 0;
    std::optional<Mlp> enhancer;
  };
  struct Keys {
    Var keys;
    Var values;
  };

  size_t head_slot(size_t task) const { return config_.per_task_heads ? task : 0; }
  const InteractionPath& path(Path p) const;

  std::vector<Var> expert_outputs(Tape& tape, Var x) const;
  Var task_representation(Tape& tape, Var x, const std::vector<Var>& experts,
                          size_t task) const;
  Var natural_head(Tape& tape, Var phi, size_t task) const;
  Keys path_keys(Tape& tape, Var phi, const InteractionPath& p) const;
  Var embed(Tape& tape, Var one_hot, const InteractionPath& p) const;
  Var attend(Tape& tape, Var embedding, const Keys& keys, const InteractionPath& p) const;
  Var enhance(Tape& tape, Var psi, const InteractionPath& p) const;
  Var incremental_for(Tape& tape, Var embedding, const Keys& keys, size_t slot) const;

  void check_task(size_t task) const;
  void check_features(std::span<const double> x) const;

  ModelConfig config_;
  diff::ParameterStore params_;
  std::vector<size_t> gates_;
  std::vector<Mlp> experts_;
  InteractionPath base_path_;
  std::optional<InteractionPath> secondary_path_;
  std::vector<size_t> natural_heads_;
  std::vector<size_t> base_heads_;
  std::vector<size_t> incremental_heads_;
  std::vector<size_t> joint_heads_;
};

}  // namespace mtmt::model

#endif  // MTMT_MODEL_MTMT_MODEL_HPP_
