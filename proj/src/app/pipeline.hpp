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

#ifndef MTMT_APP_PIPELINE_HPP_
#define MTMT_APP_PIPELINE_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "app/run_config.hpp"
#include "metrics/uplift_metrics.hpp"
#include "model/learner.hpp"
#include "train/trainer.hpp"

namespace mtmt::app {

// Raw (unnormalized) train/test partition of the configured data source.
struct PreparedData {
  data::Dataset train;
  data::Dataset test;
  std::optional<data::OracleIte> test_oracle;
};

PreparedData prepare_data(const RunConfig& config);

struct TrainedModel {
  std::unique_ptr<model::UpliftLearner> learner;
  data::Normalizer normalizer;
  train::TrainReport report;
};

// Fits the normalizer on the train split, then trains `method`.
TrainedModel train_model(model::Method method, const model::ModelConfig& model_config,
                         const train::TrainConfig& train_config, const data::Dataset& train,
                         bool normalize);

model::Predictions score_dataset(const model::UpliftLearner& learner,
                                 const data::Normalizer& normalizer, const data::Dataset& data);

nlohmann::json checkpoint_meta(const RunConfig& config, const data::Normalizer& normalizer,
                               const data::DatasetSchema& schema);

// Command entry points. Each writes its outputs under config.output_dir.
void cmd_gen_data(const RunConfig& config);
train::TrainReport cmd_train(const RunConfig& config);
metrics::EvaluationReport cmd_evaluate(const RunConfig& config, const std::string& checkpoint);
void cmd_score(const RunConfig& config, const std::string& checkpoint,
               const std::string& features_csv);

struct VariantResult {
  std::string name;
  metrics::EvaluationReport report;
};
std::vector<VariantResult> cmd_ablate(const RunConfig& config);

// Worker cap from MTMT_NUM_THREADS, else the hardware concurrency.
size_t worker_threads();

}  // namespace mtmt::app

#endif  // MTMT_APP_PIPELINE_HPP_
