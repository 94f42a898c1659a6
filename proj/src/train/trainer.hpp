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

#ifndef MTMT_TRAIN_TRAINER_HPP_
#define MTMT_TRAIN_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "data/dataset.hpp"
#include "json.hpp"
#include "model/config.hpp"
#include "model/learner.hpp"

namespace mtmt::train {

struct TrainConfig {
  double learning_rate = 1e-3;
  size_t batch_size = 1024;
  size_t max_epochs = 50;
  uint64_t seed = 0;
  // Empty means weight 1 for every task.
  std::vector<double> task_weights;
  double weight_decay = 0.01;

  void validate() const;
  std::vector<double> resolved_weights(size_t num_tasks) const;
};

void to_json(nlohmann::json& j, const TrainConfig& config);
void from_json(const nlohmann::json& j, TrainConfig& config);

struct TrainReport {
  std::vector<double> epoch_loss;
  double wall_seconds = 0.0;
  uint64_t checksum = 0;
  size_t steps = 0;
};

// Called after every epoch with (epoch index, mean loss).
using EpochCallback = std::function<void(size_t, double)>;

std::unique_ptr<model::UpliftLearner> make_learner(model::Method method,
                                                   const model::ModelConfig& config,
                                                   uint64_t seed);

// Seed used for parameter initialization in a run seeded with `seed`.
uint64_t init_seed(uint64_t seed);

// Shuffled mini-batch AdamW with cosine annealing over every step of the run.
// Dimension mismatches between learner and data raise schema errors before
// any update. Marks the learner fitted.
TrainReport fit(model::UpliftLearner& learner, const data::Dataset& train,
                const TrainConfig& config, const EpochCallback& on_epoch = {});

struct FitResult {
  std::unique_ptr<model::UpliftLearner> learner;
  TrainReport report;
};

// Resolves `config` against the data, builds the learner and trains it.
FitResult fit(model::Method method, model::ModelConfig config, const data::Dataset& train,
              const TrainConfig& train_config, const EpochCallback& on_epoch = {});

}  // namespace mtmt::train

#endif  // MTMT_TRAIN_TRAINER_HPP_
