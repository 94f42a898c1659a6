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

#include "app/run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "core/error.hpp"
#include "core/random.hpp"

namespace mtmt::app {
namespace {

const std::set<std::string> kTopLevelKeys = {"method", "seed",     "output_dir", "data",
                                             "split",  "normalize", "model",     "train",
                                             "evaluate"};

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  check(j.is_object(), ErrorKind::kConfig, where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    check(allowed.count(key) != 0, ErrorKind::kConfig, "unknown key '" + key + "' in " + where);
}

CsvSource parse_csv_source(const nlohmann::json& j) {
  reject_unknown(j, {"path", "schema", "oracle", "on_error"}, "data.csv");
  CsvSource src;
  src.path = j.at("path").get<std::string>();
  src.schema = j.at("schema").get<data::DatasetSchema>();
  src.oracle_path = j.value("oracle", std::string());
  const std::string policy = j.value("on_error", std::string("abort"));
  check(policy == "abort" || policy == "skip", ErrorKind::kConfig,
        "data.csv.on_error must be abort or skip, got '" + policy + "'");
  src.on_error = policy == "abort" ? data::RowErrorPolicy::kAbort : data::RowErrorPolicy::kSkip;
  return src;
}

}  // namespace

void RunConfig::validate() const {
  check(!(data.synthetic && data.csv), ErrorKind::kConfig,
        "data must name exactly one source: synthetic or csv");
  check(std::isfinite(test_fraction) && test_fraction > 0.0 && test_fraction < 1.0,
        ErrorKind::kConfig, "split.test_fraction must lie in (0, 1)");
  check(std::isfinite(lift_fraction) && lift_fraction > 0.0 && lift_fraction <= 1.0,
        ErrorKind::kConfig, "evaluate.lift_fraction must lie in (0, 1]");
  check(!output_dir.empty(), ErrorKind::kConfig, "output_dir must not be empty");
  if (data.synthetic) data.synthetic->validate();
  if (data.csv) data.csv->schema.validate();
  train.validate();
}

RunConfig parse_run_config(const nlohmann::json& j) {
  RunConfig c;
  try {
    reject_unknown(j, kTopLevelKeys, "the run configuration");
    c.method = model::parse_method(j.value("method", std::string("mtmt")));
    c.seed = j.value("seed", c.seed);
    c.output_dir = j.value("output_dir", c.output_dir);
    if (j.contains("data")) {
      const auto& d = j.at("data");
      reject_unknown(d, {"synthetic", "csv"}, "data");
      check(!(d.contains("synthetic") && d.contains("csv")), ErrorKind::kConfig,
            "data must name exactly one source: synthetic or csv");
      if (d.contains("synthetic")) c.data.synthetic = d.at("synthetic").get<data::SyntheticSpec>();
      if (d.contains("csv")) c.data.csv = parse_csv_source(d.at("csv"));
    }
    if (j.contains("split")) {
      reject_unknown(j.at("split"), {"test_fraction"}, "split");
      c.test_fraction = j.at("split").value("test_fraction", c.test_fraction);
    }
    c.normalize = j.value("normalize", c.normalize);
    if (j.contains("model")) c.model = j.at("model").get<model::ModelConfig>();
    if (j.contains("train")) c.train = j.at("train").get<train::TrainConfig>();
    if (j.contains("evaluate")) {
      const auto& e = j.at("evaluate");
      reject_unknown(e, {"lift_fraction", "rank_task"}, "evaluate");
      c.lift_fraction = e.value("lift_fraction", c.lift_fraction);
      c.rank_task = e.value("rank_task", c.rank_task);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kConfig, std::string("invalid configuration value: ") + e.what());
  }
  c.train.seed = c.seed;
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  check(in.good(), ErrorKind::kConfig, "cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kConfig, "config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

nlohmann::json resolved_json(const RunConfig& c) {
  nlohmann::json j;
  j["method"] = model::method_name(c.method);
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  nlohmann::json data = nlohmann::json::object();
  if (c.data.synthetic) data["synthetic"] = *c.data.synthetic;
  if (c.data.csv) {
    const CsvSource& src = *c.data.csv;
    data["csv"] = {{"path", src.path},
                   {"schema", src.schema},
                   {"oracle", src.oracle_path},
                   {"on_error", src.on_error == data::RowErrorPolicy::kAbort ? "abort" : "skip"}};
  }
  j["data"] = data;
  j["split"] = {{"test_fraction", c.test_fraction}};
  j["normalize"] = c.normalize;
  j["model"] = c.model;
  j["train"] = c.train;
  j["evaluate"] = {{"lift_fraction", c.lift_fraction}, {"rank_task", c.rank_task}};
  return j;
}

uint64_t data_seed(const RunConfig& config) { return derive_seed(config.seed, 10); }
uint64_t split_seed(const RunConfig& config) { return derive_seed(config.seed, 20); }

}  // namespace mtmt::app
