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

#include "baselines/learners.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace mtmt::baselines {
namespace {

using diff::Tape;
using diff::Var;

std::vector<size_t> output_widths(const ModelConfig& config) {
  std::vector<size_t> widths = config.expert_hidden;
  widths.push_back(config.num_tasks);
  return widths;
}

void check_config(const ModelConfig& config) {
  check(config.feature_dim > 0 && config.num_tasks > 0 && config.num_treatments > 0,
        ErrorKind::kConfig, "baseline dimensions must be resolved before construction");
  for (size_t w : config.expert_hidden)
    check(w > 0, ErrorKind::kConfig, "hidden widths must be positive");
}

Matrix chunk_rows(const Matrix& features, size_t start, size_t rows) {
  Matrix chunk(rows, features.cols());
  for (size_t r = 0; r < rows; ++r)
    std::copy(features.row(start + r).begin(), features.row(start + r).end(),
              chunk.row(r).begin());
  return chunk;
}

// Sum over rows and tasks of w_k * residual^2.
Var weighted_squared_error(Tape& tape, Var prediction, const Matrix& target,
                           std::span<const double> task_weights) {
  Matrix weights(target.rows(), target.cols());
  for (size_t r = 0; r < target.rows(); ++r)
    for (size_t k = 0; k < target.cols(); ++k) weights(r, k) = task_weights[k];
  Var residual = sub(prediction, tape.constant(target));
  return sum_all(mul(mul(residual, residual), tape.constant(std::move(weights))));
}

}  // namespace

std::vector<double> s_learner_input(std::span<const double> x, int base, int secondary,
                                    size_t num_treatments) {
  std::vector<double> input(x.begin(), x.end());
  input.push_back(base == 1 ? 1.0 : 0.0);
  for (size_t t = 0; t < num_treatments; ++t)
    input.push_back(base == 1 && secondary == static_cast<int>(t) ? 1.0 : 0.0);
  return input;
}

Matrix s_learner_differences(const ResponseFn& f, std::span<const double> x,
                             size_t num_treatments) {
  const std::vector<double> control = f(s_learner_input(x, 0, data::kNoTreatment, num_treatments));
  Matrix gamma(control.size(), num_treatments);
  for (size_t t = 0; t < num_treatments; ++t) {
    const std::vector<double> treated =
        f(s_learner_input(x, 1, static_cast<int>(t), num_treatments));
    check(treated.size() == control.size(), ErrorKind::kShape,
          "response width changed between candidates");
    for (size_t k = 0; k < control.size(); ++k) gamma(k, t) = treated[k] - control[k];
  }
  return gamma;
}

Matrix t_learner_differences(std::span<const ResponseFn> branches, std::span<const double> x) {
  check(branches.size() >= 2, ErrorKind::kContract, "need a control and at least one treatment branch");
  const std::vector<double> control = branches[0](x);
  Matrix gamma(control.size(), branches.size() - 1);
  for (size_t t = 0; t + 1 < branches.size(); ++t) {
    const std::vector<double> treated = branches[t + 1](x);
    check(treated.size() == control.size(), ErrorKind::kShape, "branch output widths differ");
    for (size_t k = 0; k < control.size(); ++k) gamma(k, t) = treated[k] - control[k];
  }
  return gamma;
}

SLearner::SLearner(ModelConfig config, uint64_t seed) : config_(std::move(config)) {
  check_config(config_);
  Rng rng(seed);
  const std::vector<size_t> widths = output_widths(config_);
  net_ = model::Mlp::create(params_, "slearner", input_dim(), widths, /*relu_last=*/false,
                            /*residual=*/false, rng);
}

Matrix SLearner::forward(const Matrix& inputs) const {
  Tape tape;
  return net_.forward(tape, params_, tape.constant(inputs)).value();
}

std::vector<double> SLearner::response(std::span<const double> input) const {
  check(input.size() == input_dim(), ErrorKind::kShape,
        "input of length " + std::to_string(input.size()) + ", expected " +
            std::to_string(input_dim()));
  const Matrix out = forward(Matrix::row_vector(input));
  return {out.values().begin(), out.values().end()};
}

Matrix SLearner::uplift(std::span<const double> x) const {
  require_fitted("s-learner uplift");
  check(x.size() == config_.feature_dim, ErrorKind::kShape, "feature vector has the wrong length");
  return s_learner_differences([this](std::span<const double> in) { return response(in); }, x,
                               config_.num_treatments);
}

Var SLearner::batch_loss(Tape& tape, const data::Batch& batch,
                         std::span<const double> task_weights) const {
  model::validate_batch(batch, config_.feature_dim, config_.num_tasks, config_.num_treatments,
                        task_weights);
  Matrix inputs(batch.size(), input_dim());
  for (size_t i = 0; i < batch.size(); ++i) {
    const auto row = s_learner_input(batch.x.row(i), batch.base[i], batch.secondary[i],
                                     config_.num_treatments);
    std::copy(row.begin(), row.end(), inputs.row(i).begin());
  }
  Var prediction = net_.forward(tape, params_, tape.constant(std::move(inputs)));
  return scale(weighted_squared_error(tape, prediction, batch.y, task_weights),
               1.0 / static_cast<double>(batch.size()));
}

model::Predictions SLearner::predict(const Matrix& features) const {
  check(features.cols() == config_.feature_dim, ErrorKind::kShape,
        "feature matrix " + features.shape_string() + " but model expects " +
            std::to_string(config_.feature_dim) + " columns");
  const size_t m = config_.num_treatments;
  const size_t tasks = config_.num_tasks;
  model::Predictions out = model::Predictions::allocate(features.rows(), tasks, m);
  out.has_natural_response = true;
  for (size_t start = 0; start < features.rows(); start += model::kPredictChunk) {
    const size_t rows = std::min(model::kPredictChunk, features.rows() - start);
    const Matrix chunk = chunk_rows(features, start, rows);
    auto assemble = [&](int base, int secondary) {
      Matrix inputs(rows, input_dim());
      for (size_t r = 0; r < rows; ++r) {
        const auto row = s_learner_input(chunk.row(r), base, secondary, m);
        std::copy(row.begin(), row.end(), inputs.row(r).begin());
      }
      return inputs;
    };
    const Matrix control = forward(assemble(0, data::kNoTreatment));
    for (size_t r = 0; r < rows; ++r)
      for (size_t k = 0; k < tasks; ++k) out.natural_at(start + r, k) = control(r, k);
    for (size_t t = 0; t < m; ++t) {
      const Matrix treated = forward(assemble(1, static_cast<int>(t)));
      for (size_t r = 0; r < rows; ++r)
        for (size_t k = 0; k < tasks; ++k) {
          const double gamma = treated(r, k) - control(r, k);
          out.incremental_at(start + r, k, t) = gamma;
          out.gamma_at(start + r, k, t + 1) = gamma;
        }
    }
  }
  return out;
}

TLearner::TLearner(ModelConfig config, uint64_t seed) : config_(std::move(config)) {
  check_config(config_);
  Rng rng(seed);
  const std::vector<size_t> widths = output_widths(config_);
  for (size_t g = 0; g <= config_.num_treatments; ++g)
    branches_.push_back(model::Mlp::create(params_, "tlearner.branch" + std::to_string(g),
                                           config_.feature_dim, widths, /*relu_last=*/false,
                                           /*residual=*/false, rng));
}

Matrix TLearner::forward(size_t branch, const Matrix& features) const {
  Tape tape;
  return branches_[branch].forward(tape, params_, tape.constant(features)).value();
}

std::vector<double> TLearner::branch_response(size_t branch, std::span<const double> x) const {
  check(branch < branches_.size(), ErrorKind::kIndex,
        "branch " + std::to_string(branch) + " out of range");
  check(x.size() == config_.feature_dim, ErrorKind::kShape, "feature vector has the wrong length");
  const Matrix out = forward(branch, Matrix::row_vector(x));
  return {out.values().begin(), out.values().end()};
}

Matrix TLearner::uplift(std::span<const double> x) const {
  require_fitted("t-learner uplift");
  std::vector<ResponseFn> fns;
  for (size_t g = 0; g < branches_.size(); ++g)
    fns.push_back([this, g](std::span<const double> in) { return branch_response(g, in); });
  return t_learner_differences(fns, x);
}

Var TLearner::batch_loss(Tape& tape, const data::Batch& batch,
                         std::span<const double> task_weights) const {
  model::validate_batch(batch, config_.feature_dim, config_.num_tasks, config_.num_treatments,
                        task_weights);
  std::vector<std::vector<size_t>> groups(branches_.size());
  for (size_t i = 0; i < batch.size(); ++i)
    groups[batch.base[i] == 1 ? static_cast<size_t>(batch.secondary[i]) + 1 : 0].push_back(i);
  Var x = tape.constant(batch.x);
  Var total;
  for (size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) continue;
    Matrix target(groups[g].size(), config_.num_tasks);
    for (size_t r = 0; r < groups[g].size(); ++r)
      std::copy(batch.y.row(groups[g][r]).begin(), batch.y.row(groups[g][r]).end(),
                target.row(r).begin());
    Var prediction = branches_[g].forward(tape, params_, gather_rows(x, groups[g]));
    Var term = weighted_squared_error(tape, prediction, target, task_weights);
    total = total.valid() ? add(total, term) : term;
  }
  return scale(total, 1.0 / static_cast<double>(batch.size()));
}

model::Predictions TLearner::predict(const Matrix& features) const {
  check(features.cols() == config_.feature_dim, ErrorKind::kShape,
        "feature matrix " + features.shape_string() + " but model expects " +
            std::to_string(config_.feature_dim) + " columns");
  const size_t m = config_.num_treatments;
  const size_t tasks = config_.num_tasks;
  model::Predictions out = model::Predictions::allocate(features.rows(), tasks, m);
  out.has_natural_response = true;
  for (size_t start = 0; start < features.rows(); start += model::kPredictChunk) {
    const size_t rows = std::min(model::kPredictChunk, features.rows() - start);
    const Matrix chunk = chunk_rows(features, start, rows);
    const Matrix control = forward(0, chunk);
    for (size_t r = 0; r < rows; ++r)
      for (size_t k = 0; k < tasks; ++k) out.natural_at(start + r, k) = control(r, k);
    for (size_t t = 0; t < m; ++t) {
      const Matrix treated = forward(t + 1, chunk);
      for (size_t r = 0; r < rows; ++r)
        for (size_t k = 0; k < tasks; ++k) {
          const double gamma = treated(r, k) - control(r, k);
          out.incremental_at(start + r, k, t) = gamma;
          out.gamma_at(start + r, k, t + 1) = gamma;
        }
    }
  }
  return out;
}

}  // namespace mtmt::baselines
