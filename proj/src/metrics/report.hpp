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

#ifndef MTMT_METRICS_REPORT_HPP_
#define MTMT_METRICS_REPORT_HPP_

#include <string>
#include <vector>

#include "metrics/uplift_metrics.hpp"

namespace mtmt::metrics {

// Key/value text: one "<key> = <value>" line per metric.
std::string report_text(const EvaluationReport& report, const std::string& method);
// One row per (task, treatment).
std::string report_csv(const EvaluationReport& report, const std::string& method);
std::string curve_csv(const Curve& curve);
// Writes <dir>/qini_k<k>_t<t>.csv and <dir>/auuc_k<k>_t<t>.csv; returns the paths.
std::vector<std::string> write_curves(const std::string& dir, const EvaluationReport& report);

// name,mean,mean_abs,std,q00..q100
std::string distribution_summary_csv(const EffectDistributions& dist);
// row,<series names...>
std::string distribution_values_csv(const EffectDistributions& dist);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace mtmt::metrics

#endif  // MTMT_METRICS_REPORT_HPP_
