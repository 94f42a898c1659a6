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

#ifndef MTMT_BASELINES_LEARNERS_HPP_
#define MTMT_BASELINES_LEARNERS_HPP_

#include <functional>
#include <span>
#include <vector>

#include "model/config.hpp"
#include "model/learner.hpp"
#include "model/mlp.hpp"

namespace mtmt::baselines {

using diff::Matrix;
using model::ModelConfig;

// Outcome vector (one value per task) for one input row.
using ResponseFn = std::function<std::vector<double>(std::span<const double>)>;

// Input row [x, base flag, secondary one-hot] for the single-model learner.
std::vector<double> s_learner_input(std::span<const double> x, int base, int secondary,
                                    size_t num_treatments);

// Gamma(k, m) = f(x, treated with m) - f(x, untreated); rows are tasks.
Matrix s_learner_differences(const ResponseFn& f, std::span<const double> x,
                             size_t num_treatments);
// Gamma(k, m) = branch_{m+1}(x) - branch_0(x); branch 0 is the control model.
Matrix t_learner_differences(std::span<const ResponseFn> branches, std::span<const double> x);

// One response network over the features plus treatment indicators. Uses the
// expert hidden widths of the model configuration.
class SLearner final : public model::UpliftLearner {
 public:
  SLearner(ModelConfig config, uint64_t seed);

  model::Method method() const override { return model::Method::kSLearner; }
  size_t feature_dim() const override { return config_.feature_dim; }
  size_t num_tasks() const override { return config_.num_tasks; }
  size_t num_treatments() const override { return config_.num_treatments; }
  nlohmann::json config_json() const override { return config_; }
  const diff::ParameterStore& parameters() const override { return params_; }
  diff::ParameterStore& parameters() override { return params_; }

  size_t input_dim() const { return config_.feature_dim + 1 + config_.num_treatments; }
  std::vector<double> response(std::span<const double> input) const;
  // Tasks x treatments; contract error before fitting.
  Matrix uplift(std::span<const double> x) const;

  diff::Var batch_loss(diff::Tape& tape, const data::Batch& batch,
                       std::span<const double> task_weights) const override;
  model::Predictions predict(const Matrix& features) const override;

 private:
  Matrix forward(const Matrix& inputs) const;

  ModelConfig config_;
  diff::ParameterStore params_;
  model::Mlp net_;
};

// Separate response networks for control and for each secondary treatment.
class TLearner final : public model::UpliftLearner {
 public:
  TLearner(ModelConfig config, uint64_t seed);

  model::Method method() const override { return model::Method::kTLearner; }
  size_t feature_dim() const override { return config_.feature_dim; }
  size_t num_tasks() const override { return config_.num_tasks; }
  size_t num_treatments() const override { return config_.num_treatments; }
  nlohmann::json config_json() const override { return config_; }
  const diff::ParameterStore& parameters() const override { return params_; }
  diff::ParameterStore& parameters() override { return params_; }

  size_t branch_count() const { return branches_.size(); }
  // Branch 0 is control, branch m + 1 serves secondary treatment m.
  std::vector<double> branch_response(size_t branch, std::span<const double> x) const;
  Matrix uplift(std::span<const double> x) const;

  diff::Var batch_loss(diff::Tape& tape, const data::Batch& batch,
                       std::span<const double> task_weights) const override;
  model::Predictions predict(const Matrix& features) const override;

 private:
  Matrix forward(size_t branch, const Matrix& features) const;

  ModelConfig config_;
  diff::ParameterStore params_;
  std::vector<model::Mlp> branches_;
};

}  // namespace mtmt::baselines

#endif  // MTMT_BASELINES_LEARNERS_HPP_
