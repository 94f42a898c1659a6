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

#ifndef MTMT_METRICS_UPLIFT_METRICS_HPP_
#define MTMT_METRICS_UPLIFT_METRICS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "data/dataset.hpp"
#include "model/predictions.hpp"

namespace mtmt::metrics {

struct CohortUnit {
  double score = 0.0;
  int treated = 0;
  double outcome = 0.0;
  size_t index = 0;
};

// Units sorted by descending score; equal scores keep ascending index order.
class RankedCohort {
 public:
  // Metric error on an empty cohort, a non-finite score or a flag outside {0, 1}.
  static RankedCohort rank(std::vector<CohortUnit> units);

  size_t size() const { return units_.size(); }
  const CohortUnit& operator[](size_t i) const { return units_[i]; }
  std::span<const CohortUnit> units() const { return units_; }
  size_t treated_count() const;

 private:
  std::vector<CohortUnit> units_;
};

// Cumulative group counts and outcome sums; entry i covers the first i units,
// so every vector has size() + 1 entries starting from the empty prefix.
struct PrefixStats {
  std::vector<double> n_treated;
  std::vector<double> n_control;
  std::vector<double> y_treated;
  std::vector<double> y_control;

  static PrefixStats compute(const RankedCohort& cohort);
  size_t size() const { return n_treated.size() - 1; }
};

struct Curve {
  std::vector<double> fraction;
  std::vector<double> value;
};

struct MetricResult {
  double coefficient = 0.0;
  Curve curve;
};

inline constexpr double kDefaultLiftFraction = 0.30;

// Both need at least one treated and one control unit (metric error otherwise).
MetricResult qini(const RankedCohort& cohort);
MetricResult auuc(const RankedCohort& cohort);
// Treated mean minus control mean over the top ceil(k * n) units.
double lift_at_k(const RankedCohort& cohort, double k = kDefaultLiftFraction);

struct MetricRow {
  size_t task = 0;
  size_t treatment = 0;
  size_t cohort_size = 0;
  size_t treated = 0;
  size_t control = 0;
  double qini = 0.0;
  double auuc = 0.0;
  double lift = 0.0;
  Curve qini_curve;
  Curve auuc_curve;
};

struct EvaluationReport {
  double lift_fraction = kDefaultLiftFraction;
  std::vector<MetricRow> rows;  // task-major, then treatment

  const MetricRow& at(size_t task, size_t treatment) const;
  // Mean qini over every (task, treatment) row.
  double mean_qini() const;
};

// For each task and secondary treatment m, ranks {control} and {received m}
// by the candidate-(m + 1) overall uplift. `row_ids` supplies the tie-break
// index per row and defaults to the row position.
EvaluationReport evaluate(const model::Predictions& scores, const data::Dataset& data,
                          double lift_fraction = kDefaultLiftFraction,
                          std::span<const size_t> row_ids = {});

inline constexpr size_t kQuantileCount = 11;

struct Summary {
  double mean = 0.0;
  double mean_abs = 0.0;
  double stddev = 0.0;
  // Minimum, deciles, maximum (linear interpolation between order statistics).
  std::vector<double> quantiles;

  static Summary of(std::span<const double> values);
};

struct EffectSeries {
  std::string name;  // base_k<k> or incremental_k<k>_t<t>
  size_t task = 0;
  bool incremental = false;
  size_t treatment = 0;
  std::vector<double> values;
  Summary summary;
};

struct EffectDistributions {
  std::vector<EffectSeries> series;
  const EffectSeries* find(const std::string& name) const;
};

// Base uplift per task (tiered learners only) and incremental uplift per task
// and treatment, with the per-sample values kept for plotting.
EffectDistributions effect_distributions(const model::Predictions& scores);

}  // namespace mtmt::metrics

#endif  // MTMT_METRICS_UPLIFT_METRICS_HPP_
