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

#ifndef MTMT_DATA_DATASET_HPP_
#define MTMT_DATA_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "diff/matrix.hpp"
#include "json.hpp"

namespace mtmt::data {

using diff::Matrix;

inline constexpr int kNoTreatment = -1;

enum class FeatureKind { kContinuous, kDiscrete };

struct FeatureColumn {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
};

struct DatasetSchema {
  std::vector<FeatureColumn> features;
  std::string base_treatment = "treatment";
  // Empty when the data has a single treatment.
  std::string secondary_treatment;
  std::vector<std::string> outcomes;
  // 0 means "infer from the data".
  size_t num_treatments = 0;

  void validate() const;
  size_t feature_dim() const { return features.size(); }
  size_t num_tasks() const { return outcomes.size(); }

  // Column layout written for generated data: x0.., treatment, secondary, y0..
  static DatasetSchema generated(size_t num_features, size_t num_discrete,
                                 size_t num_tasks, size_t num_treatments);
};

void to_json(nlohmann::json& j, const DatasetSchema& schema);
void from_json(const nlohmann::json& j, DatasetSchema& schema);

// One observation. `secondary` holds the received treatment index for treated
// units and kNoTreatment for control units.
struct Sample {
  std::vector<double> x;
  int base = 0;
  int secondary = kNoTreatment;
  std::vector<double> y;
};

struct Batch {
  Matrix x;
  std::vector<int> base;
  std::vector<int> secondary;
  Matrix y;

  size_t size() const { return x.rows(); }
};

// Column-oriented collection of samples sharing one schema.
class Dataset {
 public:
  Dataset() = default;
  Dataset(DatasetSchema schema, size_t num_treatments);

  const DatasetSchema& schema() const { return schema_; }
  size_t size() const { return base_.size(); }
  size_t feature_dim() const { return schema_.feature_dim(); }
  size_t num_tasks() const { return schema_.num_tasks(); }
  size_t num_treatments() const { return num_treatments_; }

  void reserve(size_t n);
  // Validates the sample (data error on violation) and appends it.
  void add(const Sample& sample);

  Sample sample(size_t i) const;
  std::span<const double> features(size_t i) const;
  std::span<double> mutable_features(size_t i);
  int base(size_t i) const { return base_[i]; }
  int secondary(size_t i) const { return secondary_[i]; }
  double outcome(size_t i, size_t task) const { return outcomes_[i * num_tasks() + task]; }

  size_t treated_count() const;
  Matrix feature_matrix() const;
  Dataset subset(std::span<const size_t> rows) const;
  Batch batch(std::span<const size_t> rows) const;

  bool operator==(const Dataset& other) const;

 private:
  DatasetSchema schema_;
  size_t num_treatments_ = 1;
  std::vector<double> features_;
  std::vector<int> base_;
  std::vector<int> secondary_;
  std::vector<double> outcomes_;
};

// Ground-truth effects per sample: base(i, k) and incremental(i, k * m + j).
struct OracleIte {
  size_t num_tasks = 0;
  size_t num_treatments = 0;
  Matrix base;
  Matrix incremental;

  size_t size() const { return base.rows(); }
  double incremental_at(size_t i, size_t task, size_t treatment) const {
    return incremental(i, task * num_treatments + treatment);
  }
  OracleIte subset(std::span<const size_t> rows) const;
};

// Seeded partition into disjoint index sets. Sizes are floor(f * n) for every
// fraction after the first; the first takes floor(sum(f) * n) minus the rest.
// Each part lists its rows in ascending order.
std::vector<std::vector<size_t>> split_indices(size_t n, std::span<const double> fractions,
                                               uint64_t seed);

// Z-score statistics over continuous columns; discrete columns pass through.
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<bool> active;

  static Normalizer fit(const Dataset& train);
  static Normalizer identity(size_t dim);
  size_t dim() const { return mean.size(); }
  void apply(Dataset& data) const;
  void apply(Matrix& features) const;
};

void to_json(nlohmann::json& j, const Normalizer& norm);
void from_json(const nlohmann::json& j, Normalizer& norm);

}  // namespace mtmt::data

#endif  // MTMT_DATA_DATASET_HPP_
