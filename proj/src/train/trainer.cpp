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

#include "train/trainer.hpp"

#include <chrono>
#include <cmath>

#include "baselines/learners.hpp"
#include "core/error.hpp"
#include "core/random.hpp"
#include "diff/optimizer.hpp"
#include "model/mtmt_model.hpp"

namespace mtmt::train {

void TrainConfig::validate() const {
  check(std::isfinite(learning_rate) && learning_rate > 0.0, ErrorKind::kConfig,
        "train.learning_rate must be positive");
  check(batch_size > 0, ErrorKind::kConfig, "train.batch_size must be positive");
  check(std::isfinite(weight_decay) && weight_decay >= 0.0, ErrorKind::kConfig,
        "train.weight_decay must be >= 0");
  for (double w : task_weights)
    check(std::isfinite(w) && w >= 0.0, ErrorKind::kConfig, "train.task_weights must be >= 0");
}

std::vector<double> TrainConfig::resolved_weights(size_t num_tasks) const {
  if (task_weights.empty()) return std::vector<double>(num_tasks, 1.0);
  check(task_weights.size() == num_tasks, ErrorKind::kConfig,
        "train.task_weights has " + std::to_string(task_weights.size()) + " entries for " +
            std::to_string(num_tasks) + " tasks");
  return task_weights;
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
                     {"max_epochs", c.max_epochs},       {"seed", c.seed},
                     {"task_weights", c.task_weights},   {"weight_decay", c.weight_decay}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  c = TrainConfig{};
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.seed = j.value("seed", c.seed);
  c.task_weights = j.value("task_weights", c.task_weights);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
}

std::unique_ptr<model::UpliftLearner> make_learner(model::Method method,
                                                   const model::ModelConfig& config,
                                                   uint64_t seed) {
  switch (method) {
    case model::Method::kMtmt: return std::make_unique<model::MtmtModel>(config, seed);
    case model::Method::kSLearner: return std::make_unique<baselines::SLearner>(config, seed);
    case model::Method::kTLearner: return std::make_unique<baselines::TLearner>(config, seed);
  }
  fail(ErrorKind::kConfig, "unknown method");
}

uint64_t init_seed(uint64_t seed) { return derive_seed(seed, 1); }

TrainReport fit(model::UpliftLearner& learner, const data::Dataset& train,
                const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  check(train.feature_dim() == learner.feature_dim(), ErrorKind::kSchema,
        "data has " + std::to_string(train.feature_dim()) + " features, model expects " +
            std::to_string(learner.feature_dim()));
  check(train.num_tasks() == learner.num_tasks(), ErrorKind::kSchema,
        "data has " + std::to_string(train.num_tasks()) + " tasks, model expects " +
            std::to_string(learner.num_tasks()));
  check(train.num_treatments() <= learner.num_treatments(), ErrorKind::kSchema,
        "data has " + std::to_string(train.num_treatments()) +
            " secondary treatments, model expects " + std::to_string(learner.num_treatments()));
  const std::vector<double> weights = config.resolved_weights(learner.num_tasks());

  const auto start = std::chrono::steady_clock::now();
  TrainReport report;
  const size_t n = train.size();
  if (config.max_epochs > 0) check(n > 0, ErrorKind::kData, "training set is empty");
  const size_t batches = n == 0 ? 0 : (n + config.batch_size - 1) / config.batch_size;

  diff::AdamWOptions options;
  options.learning_rate = config.learning_rate;
  options.weight_decay = config.weight_decay;
  options.schedule_period = std::max<size_t>(1, config.max_epochs * batches);
  diff::AdamW optimizer(learner.parameters(), options);

  for (size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    Rng rng(derive_seed(config.seed, 100 + epoch));
    const std::vector<size_t> order = permutation(n, rng);
    double loss_sum = 0.0;
    for (size_t b = 0; b < batches; ++b) {
      const size_t begin = b * config.batch_size;
      const size_t end = std::min(n, begin + config.batch_size);
      const std::span<const size_t> rows(order.data() + begin, end - begin);
      const data::Batch batch = train.batch(rows);
      diff::Tape tape;
      diff::Var loss = learner.batch_loss(tape, batch, weights);
      const double value = loss.value()(0, 0);
      check(std::isfinite(value), ErrorKind::kContract,
            "training loss became non-finite at epoch " + std::to_string(epoch));
      optimizer.step(learner.parameters(), diff::backward(loss, learner.parameters()));
      loss_sum += value * static_cast<double>(rows.size());
    }
    report.epoch_loss.push_back(loss_sum / static_cast<double>(n));
    if (on_epoch) on_epoch(epoch, report.epoch_loss.back());
  }
  learner.mark_fitted();
  report.steps = optimizer.step_count();
  report.checksum = learner.parameters().digest();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

FitResult fit(model::Method method, model::ModelConfig config, const data::Dataset& train,
              const TrainConfig& train_config, const EpochCallback& on_epoch) {
  config.resolve(train.feature_dim(), train.num_tasks(), train.num_treatments());
  FitResult result;
  result.learner = make_learner(method, config, init_seed(train_config.seed));
  result.report = fit(*result.learner, train, train_config, on_epoch);
  return result;
}

}  // namespace mtmt::train
