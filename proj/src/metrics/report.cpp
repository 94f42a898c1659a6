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

#include "metrics/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "core/format.hpp"

namespace mtmt::metrics {
namespace {

std::string lift_label(double fraction) {
  return "lift_at_" + std::to_string(static_cast<int>(std::lround(fraction * 100.0)));
}

}  // namespace

std::string report_text(const EvaluationReport& report, const std::string& method) {
  std::ostringstream out;
  out << "method = " << method << '\n';
  out << "lift_fraction = " << format_double(report.lift_fraction) << '\n';
  for (const auto& row : report.rows) {
    const std::string key = "task" + std::to_string(row.task) + ".treatment" +
                            std::to_string(row.treatment) + ".";
    out << key << "cohort_size = " << row.cohort_size << '\n';
    out << key << "treated = " << row.treated << '\n';
    out << key << "control = " << row.control << '\n';
    out << key << "qini = " << format_double(row.qini) << '\n';
    out << key << "auuc = " << format_double(row.auuc) << '\n';
    out << key << lift_label(report.lift_fraction) << " = " << format_double(row.lift) << '\n';
  }
  return out.str();
}

std::string report_csv(const EvaluationReport& report, const std::string& method) {
  std::ostringstream out;
  out << "method,task,treatment,cohort_size,treated,control,qini,auuc,"
      << lift_label(report.lift_fraction) << '\n';
  for (const auto& row : report.rows) {
    out << method << ',' << row.task << ',' << row.treatment << ',' << row.cohort_size << ','
        << row.treated << ',' << row.control << ',' << format_double(row.qini) << ','
        << format_double(row.auuc) << ',' << format_double(row.lift) << '\n';
  }
  return out.str();
}

std::string curve_csv(const Curve& curve) {
  std::ostringstream out;
  out << "fraction,value\n";
  for (size_t i = 0; i < curve.fraction.size(); ++i)
    out << format_double(curve.fraction[i]) << ',' << format_double(curve.value[i]) << '\n';
  return out.str();
}

std::vector<std::string> write_curves(const std::string& dir, const EvaluationReport& report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  check(!ec, ErrorKind::kIo, "cannot create '" + dir + "': " + ec.message());
  std::vector<std::string> paths;
  for (const auto& row : report.rows) {
    const std::string suffix =
        "_k" + std::to_string(row.task) + "_t" + std::to_string(row.treatment) + ".csv";
    const std::string qini_path = (std::filesystem::path(dir) / ("qini" + suffix)).string();
    const std::string auuc_path = (std::filesystem::path(dir) / ("auuc" + suffix)).string();
    write_text_file(qini_path, curve_csv(row.qini_curve));
    write_text_file(auuc_path, curve_csv(row.auuc_curve));
    paths.push_back(qini_path);
    paths.push_back(auuc_path);
  }
  return paths;
}

std::string distribution_summary_csv(const EffectDistributions& dist) {
  std::ostringstream out;
  out << "name,mean,mean_abs,std";
  for (size_t q = 0; q < kQuantileCount; ++q) out << ",q" << (q < 1 ? "00" : "") << q * 10;
  out << '\n';
  for (const auto& s : dist.series) {
    out << s.name << ',' << format_double(s.summary.mean) << ','
        << format_double(s.summary.mean_abs) << ',' << format_double(s.summary.stddev);
    for (double v : s.summary.quantiles) out << ',' << format_double(v);
    out << '\n';
  }
  return out.str();
}

std::string distribution_values_csv(const EffectDistributions& dist) {
  std::ostringstream out;
  out << "row";
  for (const auto& s : dist.series) out << ',' << s.name;
  out << '\n';
  const size_t n = dist.series.empty() ? 0 : dist.series.front().values.size();
  for (size_t i = 0; i < n; ++i) {
    out << i;
    for (const auto& s : dist.series) out << ',' << format_double(s.values[i]);
    out << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  check(out.good(), ErrorKind::kIo, "cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  check(out.good(), ErrorKind::kIo, "write to '" + path + "' failed");
}

}  // namespace mtmt::metrics
