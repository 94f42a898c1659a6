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

#include "mtmt/mtmt.h"

#include <cstring>
#include <exception>
#include <memory>
#include <string>

#include "app/checkpoint.hpp"
#include "app/pipeline.hpp"
#include "app/run_config.hpp"
#include "core/error.hpp"

struct mtmt_config {
  mtmt::app::RunConfig config;
};

struct mtmt_model {
  mtmt::app::LoadedCheckpoint checkpoint;
  mtmt::data::Normalizer normalizer;
};

namespace {

thread_local std::string last_error;

mtmt_status status_of(mtmt::ErrorKind kind) {
  using mtmt::ErrorKind;
  switch (kind) {
    case ErrorKind::kShape: return MTMT_ERR_SHAPE;
    case ErrorKind::kIndex: return MTMT_ERR_INDEX;
    case ErrorKind::kContract: return MTMT_ERR_CONTRACT;
    case ErrorKind::kData: return MTMT_ERR_DATA;
    case ErrorKind::kSchema: return MTMT_ERR_SCHEMA;
    case ErrorKind::kSpec: return MTMT_ERR_SPEC;
    case ErrorKind::kMetric: return MTMT_ERR_METRIC;
    case ErrorKind::kIo: return MTMT_ERR_IO;
    case ErrorKind::kConfig: return MTMT_ERR_CONFIG;
  }
  return MTMT_ERR_INTERNAL;
}

template <typename Fn>
mtmt_status guard(Fn&& fn) {
  last_error.clear();
  try {
    fn();
    return MTMT_OK;
  } catch (const mtmt::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    last_error = std::string("internal: ") + e.what();
    return MTMT_ERR_INTERNAL;
  } catch (...) {
    last_error = "internal: unknown exception";
    return MTMT_ERR_INTERNAL;
  }
}

mtmt_status bad_argument(const char* message) {
  last_error = std::string("argument: ") + message;
  return MTMT_ERR_ARGUMENT;
}

}  // namespace

extern "C" {

const char* mtmt_version(void) { return "0.1.0"; }

const char* mtmt_status_name(mtmt_status status) {
  switch (status) {
    case MTMT_OK: return "ok";
    case MTMT_ERR_SHAPE: return "shape";
    case MTMT_ERR_INDEX: return "index";
    case MTMT_ERR_CONTRACT: return "contract";
    case MTMT_ERR_DATA: return "data";
    case MTMT_ERR_SCHEMA: return "schema";
    case MTMT_ERR_SPEC: return "spec";
    case MTMT_ERR_METRIC: return "metric";
    case MTMT_ERR_IO: return "io";
    case MTMT_ERR_CONFIG: return "config";
    case MTMT_ERR_ARGUMENT: return "argument";
    case MTMT_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* mtmt_last_error(void) { return last_error.c_str(); }

mtmt_status mtmt_config_load(const char* path, mtmt_config** out) {
  if (path == nullptr || out == nullptr) return bad_argument("null path or output handle");
  *out = nullptr;
  return guard([&] { *out = new mtmt_config{mtmt::app::load_run_config(path)}; });
}

mtmt_status mtmt_config_parse(const char* json, mtmt_config** out) {
  if (json == nullptr || out == nullptr) return bad_argument("null text or output handle");
  *out = nullptr;
  return guard([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      mtmt::fail(mtmt::ErrorKind::kConfig, std::string("configuration is not valid JSON: ") +
                                               e.what());
    }
    *out = new mtmt_config{mtmt::app::parse_run_config(j)};
  });
}

void mtmt_config_free(mtmt_config* config) { delete config; }

mtmt_status mtmt_config_set_seed(mtmt_config* config, uint64_t seed) {
  if (config == nullptr) return bad_argument("null config");
  config->config.seed = seed;
  config->config.train.seed = seed;
  return MTMT_OK;
}

mtmt_status mtmt_config_set_output_dir(mtmt_config* config, const char* dir) {
  if (config == nullptr || dir == nullptr) return bad_argument("null config or directory");
  if (*dir == '\0') return bad_argument("empty output directory");
  config->config.output_dir = dir;
  return MTMT_OK;
}

mtmt_status mtmt_config_resolved_json(const mtmt_config* config, char** out) {
  if (config == nullptr || out == nullptr) return bad_argument("null config or output");
  *out = nullptr;
  return guard([&] {
    const std::string text = mtmt::app::resolved_json(config->config).dump(2);
    char* buffer = new char[text.size() + 1];
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    *out = buffer;
  });
}

void mtmt_string_free(char* text) { delete[] text; }

mtmt_status mtmt_gen_data(const mtmt_config* config) {
  if (config == nullptr) return bad_argument("null config");
  return guard([&] { mtmt::app::cmd_gen_data(config->config); });
}

mtmt_status mtmt_train(const mtmt_config* config) {
  if (config == nullptr) return bad_argument("null config");
  return guard([&] { mtmt::app::cmd_train(config->config); });
}

mtmt_status mtmt_evaluate(const mtmt_config* config, const char* checkpoint) {
  if (config == nullptr || checkpoint == nullptr) return bad_argument("null config or path");
  return guard([&] { mtmt::app::cmd_evaluate(config->config, checkpoint); });
}

mtmt_status mtmt_score(const mtmt_config* config, const char* checkpoint,
                       const char* features_csv) {
  if (config == nullptr || checkpoint == nullptr || features_csv == nullptr)
    return bad_argument("null config or path");
  return guard([&] { mtmt::app::cmd_score(config->config, checkpoint, features_csv); });
}

mtmt_status mtmt_ablate(const mtmt_config* config) {
  if (config == nullptr) return bad_argument("null config");
  return guard([&] { mtmt::app::cmd_ablate(config->config); });
}

mtmt_status mtmt_model_load(const char* checkpoint, mtmt_model** out) {
  if (checkpoint == nullptr || out == nullptr) return bad_argument("null path or output handle");
  *out = nullptr;
  return guard([&] {
    auto model = std::make_unique<mtmt_model>();
    model->checkpoint = mtmt::app::load_checkpoint(checkpoint);
    try {
      model->normalizer = model->checkpoint.meta.at("normalizer").get<mtmt::data::Normalizer>();
    } catch (const nlohmann::json::exception& e) {
      mtmt::fail(mtmt::ErrorKind::kSchema, std::string("checkpoint lacks a normalizer: ") +
                                               e.what());
    }
    *out = model.release();
  });
}

void mtmt_model_free(mtmt_model* model) { delete model; }

const char* mtmt_model_method(const mtmt_model* model) {
  if (model == nullptr) return "";
  return mtmt::model::method_name(model->checkpoint.learner->method());
}

mtmt_status mtmt_model_dims(const mtmt_model* model, size_t* feature_dim, size_t* num_tasks,
                            size_t* num_treatments) {
  if (model == nullptr) return bad_argument("null model");
  const auto& learner = *model->checkpoint.learner;
  if (feature_dim) *feature_dim = learner.feature_dim();
  if (num_tasks) *num_tasks = learner.num_tasks();
  if (num_treatments) *num_treatments = learner.num_treatments();
  return MTMT_OK;
}

mtmt_status mtmt_model_predict(const mtmt_model* model, const double* features, size_t rows,
                               size_t cols, double* gamma, size_t gamma_len) {
  if (model == nullptr || gamma == nullptr || (features == nullptr && rows > 0))
    return bad_argument("null model, features or output buffer");
  const auto& learner = *model->checkpoint.learner;
  if (gamma_len != rows * learner.num_tasks() * (learner.num_treatments() + 1))
    return bad_argument("gamma buffer length must be rows * tasks * (treatments + 1)");
  return guard([&] {
    mtmt::diff::Matrix x(rows, cols, std::vector<double>(features, features + rows * cols));
    mtmt::check(cols == learner.feature_dim(), mtmt::ErrorKind::kSchema,
                "feature width " + std::to_string(cols) + ", model expects " +
                    std::to_string(learner.feature_dim()));
    model->normalizer.apply(x);
    const mtmt::model::Predictions p = learner.predict(x);
    std::memcpy(gamma, p.gamma.data(), p.gamma.size() * sizeof(double));
  });
}

}  // extern "C"
