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

#ifndef MTMT_APP_RUN_CONFIG_HPP_
#define MTMT_APP_RUN_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "data/csv.hpp"
#include "data/dataset.hpp"
#include "data/synthetic.hpp"
#include "json.hpp"
#include "model/config.hpp"
#include "model/learner.hpp"
#include "train/trainer.hpp"

namespace mtmt::app {

struct CsvSource {
  std::string path;
  data::DatasetSchema schema;
  // Optional ground-truth effects aligned with the rows of `path`.
  std::string oracle_path;
  data::RowErrorPolicy on_error = data::RowErrorPolicy::kAbort;
};

// Exactly one of `synthetic` and `csv` is set.
struct DataSource {
  std::optional<data::SyntheticSpec> synthetic;
  std::optional<CsvSource> csv;
};

struct RunConfig {
  model::Method method = model::Method::kMtmt;
  uint64_t seed = 0;
  std::string output_dir = "mtmt_out";
  DataSource data;
  double test_fraction = 0.2;
  bool normalize = true;
  model::ModelConfig model;
  train::TrainConfig train;
  double lift_fraction = 0.30;
  size_t rank_task = 0;

  // Config error on invalid combinations; the data source may be absent
  // only for commands that do not read data.
  void validate() const;
  bool has_data() const { return data.synthetic.has_value() || data.csv.has_value(); }
};

// Config error for malformed JSON or wrong value types.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

// Every field with defaults materialized.
nlohmann::json resolved_json(const RunConfig& config);

// Stream seeds derived from the run seed.
uint64_t data_seed(const RunConfig& config);
uint64_t split_seed(const RunConfig& config);

}  // namespace mtmt::app

#endif  // MTMT_APP_RUN_CONFIG_HPP_
