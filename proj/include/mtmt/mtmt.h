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

/* C interface to the mtmt uplift library. All functions return an
 * mtmt_status; on failure mtmt_last_error() describes the problem for the
 * calling thread until its next call into the library. */

#ifndef MTMT_MTMT_H_
#define MTMT_MTMT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(MTMT_BUILDING_LIBRARY)
#define MTMT_API __attribute__((visibility("default")))
#else
#define MTMT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mtmt_status {
  MTMT_OK = 0,
  MTMT_ERR_SHAPE = 1,
  MTMT_ERR_INDEX = 2,
  MTMT_ERR_CONTRACT = 3,
  MTMT_ERR_DATA = 4,
  MTMT_ERR_SCHEMA = 5,
  MTMT_ERR_SPEC = 6,
  MTMT_ERR_METRIC = 7,
  MTMT_ERR_IO = 8,
  MTMT_ERR_CONFIG = 9,
  MTMT_ERR_ARGUMENT = 10,
  MTMT_ERR_INTERNAL = 11
} mtmt_status;

typedef struct mtmt_config mtmt_config;
typedef struct mtmt_model mtmt_model;

MTMT_API const char* mtmt_version(void);
MTMT_API const char* mtmt_status_name(mtmt_status status);
MTMT_API const char* mtmt_last_error(void);

/* Run configuration (JSON). */
MTMT_API mtmt_status mtmt_config_load(const char* path, mtmt_config** out);
MTMT_API mtmt_status mtmt_config_parse(const char* json, mtmt_config** out);
MTMT_API void mtmt_config_free(mtmt_config* config);
MTMT_API mtmt_status mtmt_config_set_seed(mtmt_config* config, uint64_t seed);
MTMT_API mtmt_status mtmt_config_set_output_dir(mtmt_config* config, const char* dir);
/* Caller releases *out with mtmt_string_free. */
MTMT_API mtmt_status mtmt_config_resolved_json(const mtmt_config* config, char** out);
MTMT_API void mtmt_string_free(char* text);

/* Commands; outputs go to the configured output directory. */
MTMT_API mtmt_status mtmt_gen_data(const mtmt_config* config);
MTMT_API mtmt_status mtmt_train(const mtmt_config* config);
MTMT_API mtmt_status mtmt_evaluate(const mtmt_config* config, const char* checkpoint);
MTMT_API mtmt_status mtmt_score(const mtmt_config* config, const char* checkpoint,
                                const char* features_csv);
MTMT_API mtmt_status mtmt_ablate(const mtmt_config* config);

/* Fitted model loaded from a checkpoint. */
MTMT_API mtmt_status mtmt_model_load(const char* checkpoint, mtmt_model** out);
MTMT_API void mtmt_model_free(mtmt_model* model);
/* "mtmt", "s-learner" or "t-learner". */
MTMT_API const char* mtmt_model_method(const mtmt_model* model);
MTMT_API mtmt_status mtmt_model_dims(const mtmt_model* model, size_t* feature_dim,
                                     size_t* num_tasks, size_t* num_treatments);
/* Scores raw (unnormalized) row-major features. gamma receives
 * rows * num_tasks * (num_treatments + 1) values laid out as
 * [row][task][candidate]; candidate 0 is "no treatment". */
MTMT_API mtmt_status mtmt_model_predict(const mtmt_model* model, const double* features,
                                        size_t rows, size_t cols, double* gamma,
                                        size_t gamma_len);

#ifdef __cplusplus
}
#endif

#endif /* MTMT_MTMT_H_ */
