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

#include "model/learner.hpp"

#include <cmath>

#include "core/error.hpp"

namespace mtmt::model {

const char* method_name(Method method) {
  switch (method) {
    case Method::kMtmt: return "mtmt";
    case Method::kSLearner: return "s-learner";
    case Method::kTLearner: return "t-learner";
  }
  return "mtmt";
}

Method parse_method(const std::string& name) {
  if (name == "mtmt") return Method::kMtmt;
  if (name == "s-learner") return Method::kSLearner;
  if (name == "t-learner") return Method::kTLearner;
  fail(ErrorKind::kConfig, "method must be mtmt, s-learner or t-learner, got '" + name + "'");
}

void UpliftLearner::require_fitted(const char* what) const {
  check(fitted_, ErrorKind::kContract, std::string(what) + " requires fitted parameters");
}

void validate_batch(const data::Batch& batch, size_t feature_dim, size_t num_tasks,
                    size_t num_treatments, std::span<const double> task_weights) {
  check(batch.size() > 0, ErrorKind::kContract, "batch must be non-empty");
  check(batch.x.cols() == feature_dim, ErrorKind::kShape,
        "batch features " + batch.x.shape_string() + " but model expects " +
            std::to_string(feature_dim) + " columns");
  check(batch.y.rows() == batch.size() && batch.y.cols() == num_tasks, ErrorKind::kShape,
        "batch outcomes " + batch.y.shape_string() + " do not match " +
            std::to_string(batch.size()) + " samples x " + std::to_string(num_tasks) + " tasks");
  check(batch.base.size() == batch.size() && batch.secondary.size() == batch.size(),
        ErrorKind::kShape, "batch treatment vectors do not match the sample count");
  check(task_weights.size() == num_tasks, ErrorKind::kConfig,
        "expected " + std::to_string(num_tasks) + " task loss weights, got " +
            std::to_string(task_weights.size()));
  for (double w : task_weights)
    check(std::isfinite(w) && w >= 0.0, ErrorKind::kConfig, "task loss weights must be >= 0");
  for (size_t i = 0; i < batch.size(); ++i) {
    const int base = batch.base[i];
    const int secondary = batch.secondary[i];
    if (base == 1 && (secondary < 0 || static_cast<size_t>(secondary) >= num_treatments)) {
      fail(ErrorKind::kData, "treated sample " + std::to_string(i) +
                                 " has secondary treatment " + std::to_string(secondary) +
                                 " outside [0, " + std::to_string(num_treatments) + ")");
    }
    if (base != 0 && base != 1)
      fail(ErrorKind::kData, "sample " + std::to_string(i) + " base treatment must be 0 or 1");
  }
}

}  // namespace mtmt::model
