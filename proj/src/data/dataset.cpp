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

#include "data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "core/error.hpp"
#include "core/random.hpp"

namespace mtmt::data {

void DatasetSchema::validate() const {
  check(!features.empty(), ErrorKind::kSchema, "schema needs at least one feature column");
  check(!outcomes.empty(), ErrorKind::kSchema, "schema needs at least one outcome column");
  check(!base_treatment.empty(), ErrorKind::kSchema, "schema needs a base treatment column");
  std::set<std::string> names;
  auto unique = [&](const std::string& name) {
    check(!name.empty(), ErrorKind::kSchema, "empty column name in schema");
    check(names.insert(name).second, ErrorKind::kSchema,
          "column '" + name + "' appears twice in schema");
  };
  for (const auto& f : features) unique(f.name);
  unique(base_treatment);
  if (!secondary_treatment.empty()) unique(secondary_treatment);
  for (const auto& o : outcomes) unique(o);
  check(secondary_treatment.empty() ? num_treatments <= 1 : true, ErrorKind::kSchema,
        "more than one treatment requires a secondary treatment column");
}

DatasetSchema DatasetSchema::generated(size_t num_features, size_t num_discrete,
                                       size_t num_tasks, size_t num_treatments) {
  DatasetSchema schema;
  for (size_t j = 0; j < num_features; ++j) {
    const bool discrete = j >= num_features - std::min(num_discrete, num_features);
    schema.features.push_back(
        {"x" + std::to_string(j), discrete ? FeatureKind::kDiscrete : FeatureKind::kContinuous});
  }
  schema.base_treatment = "treatment";
  schema.secondary_treatment = "secondary";
  for (size_t k = 0; k < num_tasks; ++k) schema.outcomes.push_back("y" + std::to_string(k));
  schema.num_treatments = num_treatments;
  return schema;
}

void to_json(nlohmann::json& j, const DatasetSchema& schema) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : schema.features) {
    features.push_back({{"name", f.name},
                        {"kind", f.kind == FeatureKind::kDiscrete ? "discrete" : "continuous"}});
  }
  j = nlohmann::json{{"features", features},
                     {"base_treatment", schema.base_treatment},
                     {"secondary_treatment", schema.secondary_treatment},
                     {"outcomes", schema.outcomes},
                     {"num_treatments", schema.num_treatments}};
}

void from_json(const nlohmann::json& j, DatasetSchema& schema) {
  schema = DatasetSchema{};
  for (const auto& f : j.at("features")) {
    FeatureColumn column;
    if (f.is_string()) {
      column.name = f.get<std::string>();
    } else {
      column.name = f.at("name").get<std::string>();
      const std::string kind = f.value("kind", "continuous");
      check(kind == "continuous" || kind == "discrete", ErrorKind::kConfig,
            "feature kind must be continuous or discrete, got '" + kind + "'");
      column.kind = kind == "discrete" ? FeatureKind::kDiscrete : FeatureKind::kContinuous;
    }
    schema.features.push_back(std::move(column));
  }
  schema.base_treatment = j.value("base_treatment", std::string("treatment"));
  schema.secondary_treatment = j.value("secondary_treatment", std::string());
  schema.outcomes = j.at("outcomes").get<std::vector<std::string>>();
  schema.num_treatments = j.value("num_treatments", size_t{0});
}

Dataset::Dataset(DatasetSchema schema, size_t num_treatments)
    : schema_(std::move(schema)), num_treatments_(num_treatments) {
  check(num_treatments_ >= 1, ErrorKind::kSchema, "a dataset needs at least one treatment");
  schema_.num_treatments = num_treatments_;
  schema_.validate();
}

void Dataset::reserve(size_t n) {
  features_.reserve(n * feature_dim());
  base_.reserve(n);
  secondary_.reserve(n);
  outcomes_.reserve(n * num_tasks());
}

void Dataset::add(const Sample& s) {
  const std::string where = "sample " + std::to_string(size());
  check(s.x.size() == feature_dim(), ErrorKind::kData,
        where + " has " + std::to_string(s.x.size()) + " features, schema expects " +
            std::to_string(feature_dim()));
  check(s.y.size() == num_tasks(), ErrorKind::kData,
        where + " has " + std::to_string(s.y.size()) + " outcomes, schema expects " +
            std::to_string(num_tasks()));
  check(s.base == 0 || s.base == 1, ErrorKind::kData, where + " base treatment must be 0 or 1");
  if (s.base == 1) {
    check(s.secondary >= 0 && static_cast<size_t>(s.secondary) < num_treatments_,
          ErrorKind::kData,
          where + " is treated with secondary index " + std::to_string(s.secondary) +
              " outside [0, " + std::to_string(num_treatments_) + ")");
  } else {
    check(s.secondary == kNoTreatment, ErrorKind::kData,
          where + " is a control unit but carries a secondary treatment");
  }
  for (double v : s.x) check(std::isfinite(v), ErrorKind::kData, where + " has a non-finite feature");
  for (double v : s.y) check(std::isfinite(v), ErrorKind::kData, where + " has a non-finite outcome");
  features_.insert(features_.end(), s.x.begin(), s.x.end());
  base_.push_back(s.base);
  secondary_.push_back(s.secondary);
  outcomes_.insert(outcomes_.end(), s.y.begin(), s.y.end());
}

Sample Dataset::sample(size_t i) const {
  Sample s;
  const auto x = features(i);
  s.x.assign(x.begin(), x.end());
  s.base = base_[i];
  s.secondary = secondary_[i];
  s.y.assign(outcomes_.begin() + static_cast<std::ptrdiff_t>(i * num_tasks()),
             outcomes_.begin() + static_cast<std::ptrdiff_t>((i + 1) * num_tasks()));
  return s;
}

std::span<const double> Dataset::features(size_t i) const {
  return {features_.data() + i * feature_dim(), feature_dim()};
}

std::span<double> Dataset::mutable_features(size_t i) {
  return {features_.data() + i * feature_dim(), feature_dim()};
}

size_t Dataset::treated_count() const {
  size_t n = 0;
  for (int b : base_) n += static_cast<size_t>(b == 1);
  return n;
}

Matrix Dataset::feature_matrix() const { return Matrix(size(), feature_dim(), features_); }

Dataset Dataset::subset(std::span<const size_t> rows) const {
  Dataset out(schema_, num_treatments_);
  out.reserve(rows.size());
  for (size_t r : rows) {
    check(r < size(), ErrorKind::kIndex, "subset row " + std::to_string(r) + " out of range");
    const auto x = features(r);
    out.features_.insert(out.features_.end(), x.begin(), x.end());
    out.base_.push_back(base_[r]);
    out.secondary_.push_back(secondary_[r]);
    for (size_t k = 0; k < num_tasks(); ++k) out.outcomes_.push_back(outcome(r, k));
  }
  return out;
}

Batch Dataset::batch(std::span<const size_t> rows) const {
  Batch b;
  b.x = Matrix(rows.size(), feature_dim());
  b.y = Matrix(rows.size(), num_tasks());
  b.base.resize(rows.size());
  b.secondary.resize(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    const size_t i = rows[r];
    const auto x = features(i);
    std::copy(x.begin(), x.end(), b.x.row(r).begin());
    for (size_t k = 0; k < num_tasks(); ++k) b.y(r, k) = outcome(i, k);
    b.base[r] = base_[i];
    b.secondary[r] = secondary_[i];
  }
  return b;
}

bool Dataset::operator==(const Dataset& other) const {
  return num_treatments_ == other.num_treatments_ && features_ == other.features_ &&
         base_ == other.base_ && secondary_ == other.secondary_ &&
         outcomes_ == other.outcomes_;
}

OracleIte OracleIte::subset(std::span<const size_t> rows) const {
  OracleIte out;
  out.num_tasks = num_tasks;
  out.num_treatments = num_treatments;
  out.base = Matrix(rows.size(), base.cols());
  out.incremental = Matrix(rows.size(), incremental.cols());
  for (size_t r = 0; r < rows.size(); ++r) {
    check(rows[r] < size(), ErrorKind::kIndex, "oracle row out of range");
    std::copy(base.row(rows[r]).begin(), base.row(rows[r]).end(), out.base.row(r).begin());
    std::copy(incremental.row(rows[r]).begin(), incremental.row(rows[r]).end(),
              out.incremental.row(r).begin());
  }
  return out;
}

std::vector<std::vector<size_t>> split_indices(size_t n, std::span<const double> fractions,
                                               uint64_t seed) {
  check(!fractions.empty(), ErrorKind::kSpec, "split needs at least one fraction");
  double total = 0.0;
  for (double f : fractions) {
    check(std::isfinite(f) && f > 0.0, ErrorKind::kSpec, "split fractions must be positive");
    total += f;
  }
  check(total <= 1.0 + 1e-12, ErrorKind::kSpec, "split fractions sum above 1");
  constexpr double kFuzz = 1e-9;
  std::vector<size_t> sizes(fractions.size());
  size_t rest = 0;
  for (size_t i = 1; i < fractions.size(); ++i) {
    sizes[i] = static_cast<size_t>(std::floor(fractions[i] * static_cast<double>(n) + kFuzz));
    rest += sizes[i];
  }
  const size_t used =
      std::min(n, static_cast<size_t>(std::floor(total * static_cast<double>(n) + kFuzz)));
  sizes[0] = used >= rest ? used - rest : 0;

  Rng rng(seed);
  const std::vector<size_t> order = permutation(n, rng);
  std::vector<std::vector<size_t>> parts(fractions.size());
  size_t offset = 0;
  for (size_t i = 0; i < sizes.size(); ++i) {
    parts[i].assign(order.begin() + static_cast<std::ptrdiff_t>(offset),
                    order.begin() + static_cast<std::ptrdiff_t>(offset + sizes[i]));
    std::sort(parts[i].begin(), parts[i].end());
    offset += sizes[i];
  }
  return parts;
}

Normalizer Normalizer::fit(const Dataset& train) {
  const size_t d = train.feature_dim();
  Normalizer norm = identity(d);
  const size_t n = train.size();
  if (n == 0) return norm;
  for (size_t j = 0; j < d; ++j) {
    if (train.schema().features[j].kind != FeatureKind::kContinuous) continue;
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) sum += train.features(i)[j];
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double delta = train.features(i)[j] - mean;
      ss += delta * delta;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    norm.mean[j] = mean;
    norm.scale[j] = sd > 0.0 ? sd : 1.0;
    norm.active[j] = true;
  }
  return norm;
}

Normalizer Normalizer::identity(size_t dim) {
  Normalizer norm;
  norm.mean.assign(dim, 0.0);
  norm.scale.assign(dim, 1.0);
  norm.active.assign(dim, false);
  return norm;
}

void Normalizer::apply(Dataset& data) const {
  check(data.feature_dim() == dim(), ErrorKind::kSchema,
        "normalizer covers " + std::to_string(dim()) + " features, data has " +
            std::to_string(data.feature_dim()));
  for (size_t i = 0; i < data.size(); ++i) {
    auto x = data.mutable_features(i);
    for (size_t j = 0; j < x.size(); ++j)
      if (active[j]) x[j] = (x[j] - mean[j]) / scale[j];
  }
}

void Normalizer::apply(Matrix& features) const {
  check(features.cols() == dim(), ErrorKind::kSchema,
        "normalizer covers " + std::to_string(dim()) + " features, matrix has " +
            std::to_string(features.cols()));
  for (size_t i = 0; i < features.rows(); ++i) {
    auto x = features.row(i);
    for (size_t j = 0; j < x.size(); ++j)
      if (active[j]) x[j] = (x[j] - mean[j]) / scale[j];
  }
}

void to_json(nlohmann::json& j, const Normalizer& norm) {
  j = nlohmann::json{{"mean", norm.mean}, {"scale", norm.scale}, {"active", norm.active}};
}

void from_json(const nlohmann::json& j, Normalizer& norm) {
  norm.mean = j.at("mean").get<std::vector<double>>();
  norm.scale = j.at("scale").get<std::vector<double>>();
  norm.active = j.at("active").get<std::vector<bool>>();
  check(norm.scale.size() == norm.mean.size() && norm.active.size() == norm.mean.size(),
        ErrorKind::kSchema, "normalizer vectors differ in length");
}

}  // namespace mtmt::data
