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

#ifndef MTMT_APP_CHECKPOINT_HPP_
#define MTMT_APP_CHECKPOINT_HPP_

#include <memory>
#include <string>

#include "json.hpp"
#include "model/learner.hpp"

namespace mtmt::app {

// Binary layout (little-endian):
//   "MTMTCKPT" | u32 version | u32 method | u64 len + model config JSON |
//   u64 len + metadata JSON | u64 tensor count |
//   per tensor: u64 len + name | u64 rows | u64 cols | rows*cols f64
inline constexpr uint32_t kCheckpointVersion = 1;

std::string encode_checkpoint(const model::UpliftLearner& learner, const nlohmann::json& meta);
void save_checkpoint(const std::string& path, const model::UpliftLearner& learner,
                     const nlohmann::json& meta);

struct LoadedCheckpoint {
  std::unique_ptr<model::UpliftLearner> learner;  // marked fitted
  nlohmann::json meta;
};

// Schema error for truncated, foreign or inconsistent files.
LoadedCheckpoint decode_checkpoint(const std::string& bytes);
LoadedCheckpoint load_checkpoint(const std::string& path);

std::string read_file(const std::string& path);
uint64_t file_digest(const std::string& path);

}  // namespace mtmt::app

#endif  // MTMT_APP_CHECKPOINT_HPP_
