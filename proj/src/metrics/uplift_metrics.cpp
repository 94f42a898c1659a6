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

#include "metrics/uplift_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"

namespace mtmt::metrics {
namespace {

void require_both_groups(const PrefixStats& s) {
  const size_t n = s.size();
  check(s.n_treated[n] > 0.0 && s.n_control[n] > 0.0, ErrorKind::kMetric,
        "cohort needs at least one treated and one control unit");
}

}  // namespace

RankedCohort RankedCohort::rank(std::vector<CohortUnit> units) {
  check(!units.empty(), ErrorKind::kMetric, "cohort is empty");
  for (const auto& u : units) {
    check(std::isfinite(u.score), ErrorKind::kMetric, "cohort score is not finite");
    check(u.treated == 0 || u.treated == 1, ErrorKind::kMetric, "treated flag must be 0 or 1");
  }
  std::sort(units.begin(), units.end(), [](const CohortUnit& a, const CohortUnit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.index < b.index;
  });
  RankedCohort cohort;
  cohort.units_ = std::move(units);
  return cohort;
}

size_t RankedCohort::treated_count() const {
  return static_cast<size_t>(std::count_if(units_.begin(), units_.end(),
                                           [](const CohortUnit& u) { return u.treated == 1; }));
}

PrefixStats PrefixStats::compute(const RankedCohort& cohort) {
  const size_t n = cohort.size();
  PrefixStats s;
  s.n_treated.assign(n + 1, 0.0);
  s.n_control.assign(n + 1, 0.0);
  s.y_treated.assign(n + 1, 0.0);
  s.y_control.assign(n + 1, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const CohortUnit& u = cohort[i];
    s.n_treated[i + 1] = s.n_treated[i] + (u.treated ? 1.0 : 0.0);
    s.n_control[i + 1] = s.n_control[i] + (u.treated ? 0.0 : 1.0);
    s.y_treated[i + 1] = s.y_treated[i] + (u.treated ? u.outcome : 0.0);
    s.y_control[i + 1] = s.y_control[i] + (u.treated ? 0.0 : u.outcome);
  }
  return s;
}

MetricResult qini(const RankedCohort& cohort) {
  const PrefixStats s = PrefixStats::compute(cohort);
  require_both_groups(s);
  const size_t n = s.size();
  const double nn = static_cast<double>(n);
  std::vector<double> q(n + 1, 0.0);
  for (size_t i = 1; i <= n; ++i) {
    q[i] = s.n_control[i] > 0.0 ? s.y_treated[i] - s.y_control[i] * s.n_treated[i] / s.n_control[i]
                                : s.y_treated[i];
  }
  MetricResult out;
  double area = 0.0;
  for (size_t i = 1; i <= n; ++i) {
    out.curve.fraction.push_back(static_cast<double>(i) / nn);
    out.curve.value.push_back(q[i] / nn);
    area += (q[i - 1] + q[i]) / (2.0 * nn * nn);
  }
  out.coefficient = area - q[n] / (2.0 * nn);
  return out;
}

MetricResult auuc(const RankedCohort& cohort) {
  const PrefixStats s = PrefixStats::compute(cohort);
  require_both_groups(s);
  const size_t n = s.size();
  const double nn = static_cast<double>(n);
  std::vector<double> u(n + 1, 0.0);
  for (size_t i = 1; i <= n; ++i) {
    if (s.n_treated[i] > 0.0 && s.n_control[i] > 0.0) {
      u[i] = (s.y_treated[i] / s.n_treated[i] - s.y_control[i] / s.n_control[i]) *
             (static_cast<double>(i) / nn);
    }
  }
  MetricResult out;
  double area = 0.0;
  for (size_t i = 1; i <= n; ++i) {
    out.curve.fraction.push_back(static_cast<double>(i) / nn);
    out.curve.value.push_back(u[i]);
    area += (u[i - 1] + u[i]) / (2.0 * nn);
  }
  out.coefficient = area - u[n] / 2.0;
  return out;
}

double lift_at_k(const RankedCohort& cohort, double k) {
  check(std::isfinite(k) && k > 0.0 && k <= 1.0, ErrorKind::kMetric,
        "lift fraction must lie in (0, 1]");
  const size_t n = cohort.size();
  // The tolerance keeps products such as 0.3 * 10 from rounding up to 4.
  size_t top = static_cast<size_t>(std::ceil(k * static_cast<double>(n) - 1e-9));
  top = std::clamp<size_t>(top, 1, n);
  double yt = 0.0, yc = 0.0, nt = 0.0, nc = 0.0;
  for (size_t i = 0; i < top; ++i) {
    if (cohort[i].treated) {
      yt += cohort[i].outcome;
      nt += 1.0;
    } else {
      yc += cohort[i].outcome;
      nc += 1.0;
    }
  }
  check(nt > 0.0 && nc > 0.0, ErrorKind::kMetric,
        "top " + std::to_string(top) + " units lack a treated or a control unit");
  return yt / nt - yc / nc;
}

const MetricRow& EvaluationReport::at(size_t task, size_t treatment) const {
  for (const auto& row : rows)
    if (row.task == task && row.treatment == treatment) return row;
  fail(ErrorKind::kIndex, "no report row for task " + std::to_string(task) + ", treatment " +
                              std::to_string(treatment));
}

double EvaluationReport::mean_qini() const {
  check(!rows.empty(), ErrorKind::kMetric, "report has no rows");
  double total = 0.0;
  for (const auto& row : rows) total += row.qini;
  return total / static_cast<double>(rows.size());
}

EvaluationReport evaluate(const model::Predictions& scores, const data::Dataset& data,
                          double lift_fraction, std::span<const size_t> row_ids) {
  check(scores.size == data.size(), ErrorKind::kMetric,
        "scores cover " + std::to_string(scores.size) + " units but the data has " +
            std::to_string(data.size()));
  check(scores.num_tasks == data.num_tasks(), ErrorKind::kMetric,
        "scores and data disagree on the task count");
  check(data.num_treatments() <= scores.num_treatments, ErrorKind::kMetric,
        "scores cover fewer treatments than the data");
  check(row_ids.empty() || row_ids.size() == data.size(), ErrorKind::kMetric,
        "row id count does not match the data");

  EvaluationReport report;
  report.lift_fraction = lift_fraction;
  for (size_t k = 0; k < data.num_tasks(); ++k) {
    for (size_t t = 0; t < data.num_treatments(); ++t) {
      std::vector<CohortUnit> units;
      for (size_t i = 0; i < data.size(); ++i) {
        const bool treated = data.base(i) == 1;
        if (treated && data.secondary(i) != static_cast<int>(t)) continue;
        units.push_back({scores.gamma_at(i, k, t + 1), treated ? 1 : 0, data.outcome(i, k),
                         row_ids.empty() ? i : row_ids[i]});
      }
      MetricRow row;
      row.task = k;
      row.treatment = t;
      try {
        const RankedCohort cohort = RankedCohort::rank(std::move(units));
        row.cohort_size = cohort.size();
        row.treated = cohort.treated_count();
        row.control = row.cohort_size - row.treated;
        MetricResult q = qini(cohort);
        MetricResult a = auuc(cohort);
        row.qini = q.coefficient;
        row.auuc = a.coefficient;
        row.qini_curve = std::move(q.curve);
        row.auuc_curve = std::move(a.curve);
        row.lift = lift_at_k(cohort, lift_fraction);
      } catch (const Error& e) {
        fail(ErrorKind::kMetric, "task " + std::to_string(k) + ", treatment " +
                                     std::to_string(t) + ": " + e.what());
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

Summary Summary::of(std::span<const double> values) {
  Summary s;
  s.quantiles.assign(kQuantileCount, 0.0);
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  double sum = 0.0, sum_abs = 0.0;
  for (double v : values) {
    sum += v;
    sum_abs += std::abs(v);
  }
  s.mean = sum / n;
  s.mean_abs = sum_abs / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / n);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  for (size_t q = 0; q < kQuantileCount; ++q) {
    const double pos = static_cast<double>(q) / static_cast<double>(kQuantileCount - 1) *
                       static_cast<double>(sorted.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(pos));
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    s.quantiles[q] = sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
  }
  return s;
}

const EffectSeries* EffectDistributions::find(const std::string& name) const {
  for (const auto& s : series)
    if (s.name == name) return &s;
  return nullptr;
}

EffectDistributions effect_distributions(const model::Predictions& scores) {
  EffectDistributions out;
  for (size_t k = 0; k < scores.num_tasks; ++k) {
    if (scores.has_tiers) {
      EffectSeries s;
      s.name = "base_k" + std::to_string(k);
      s.task = k;
      for (size_t i = 0; i < scores.size; ++i) s.values.push_back(scores.base_at(i, k));
      s.summary = Summary::of(s.values);
      out.series.push_back(std::move(s));
    }
    if (!scores.has_incremental) continue;
    for (size_t t = 0; t < scores.num_treatments; ++t) {
      EffectSeries s;
      s.name = "incremental_k" + std::to_string(k) + "_t" + std::to_string(t);
      s.task = k;
      s.incremental = true;
      s.treatment = t;
      for (size_t i = 0; i < scores.size; ++i) s.values.push_back(scores.incremental_at(i, k, t));
      s.summary = Summary::of(s.values);
      out.series.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace mtmt::metrics
