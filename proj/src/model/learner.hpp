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

#ifndef MTMT_MODEL_LEARNER_HPP_
#define MTMT_MODEL_LEARNER_HPP_

#include <span>
#include <string>

#include "data/dataset.hpp"
#include "diff/parameters.hpp"
#include "diff/tape.hpp"
#include "json.hpp"
#include "model/predictions.hpp"

namespace mtmt::model {

enum class Method { kMtmt, kSLearner, kTLearner };

const char* method_name(Method method);
Method parse_method(const std::string& name);

// Common surface the trainer, evaluator and checkpoint code work against.
// Parameters are immutable outside training, so predict() may run
// concurrently from several threads.
class UpliftLearner {
 public:
  virtual ~UpliftLearner() = default;

  virtual Method method() const = 0;
  virtual size_t feature_dim() const = 0;
  virtual size_t num_tasks() const = 0;
  virtual size_t num_treatments() const = 0;
  virtual nlohmann::json config_json() const = 0;

  virtual const diff::ParameterStore& parameters() const = 0;
  virtual diff::ParameterStore& parameters() = 0;

  // Scalar training objective for one mini-batch, recorded on `tape`.
  virtual diff::Var batch_loss(diff::Tape& tape, const data::Batch& batch,
                               std::span<const double> task_weights) const = 0;
  virtual Predictions predict(const diff::Matrix& features) const = 0;

  bool fitted() const { return fitted_; }
  void mark_fitted() { fitted_ = true; }

 protected:
  void require_fitted(const char* what) const;

 private:
  bool fitted_ = false;
};

// Shared validation for batch_loss implementations.
void validate_batch(const data::Batch& batch, size_t feature_dim, size_t num_tasks,
                    size_t num_treatments, std::span<const double> task_weights);

// Rows per forward pass when scoring large matrices.
inline constexpr size_t kPredictChunk = 2048;

}  // namespace mtmt::model

#endif  // MTMT_MODEL_LEARNER_HPP_
