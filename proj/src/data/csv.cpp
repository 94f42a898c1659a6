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

#include "data/csv.hpp"

#include <fstream>
#include <map>
#include <optional>

#include "core/error.hpp"
#include "core/format.hpp"

namespace mtmt::data {
namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  check(in.good(), ErrorKind::kIo, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  check(out.good(), ErrorKind::kIo, "cannot open '" + path + "' for writing");
  return out;
}

struct Header {
  std::map<std::string, size_t> columns;

  std::optional<size_t> find(const std::string& name) const {
    auto it = columns.find(name);
    if (it == columns.end()) return std::nullopt;
    return it->second;
  }

  size_t require(const std::string& name, const std::string& path) const {
    auto index = find(name);
    check(index.has_value(), ErrorKind::kSchema,
          "column '" + name + "' missing from '" + path + "'");
    return *index;
  }
};

Header read_header(std::ifstream& in, const std::string& path) {
  std::string line;
  check(static_cast<bool>(std::getline(in, line)), ErrorKind::kSchema,
        "'" + path + "' has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  Header header;
  const auto cells = split_csv_line(line);
  for (size_t i = 0; i < cells.size(); ++i) {
    const std::string name(trim(cells[i]));
    check(header.columns.emplace(name, i).second, ErrorKind::kSchema,
          "duplicate column '" + name + "' in '" + path + "'");
  }
  return header;
}

double cell_double(const std::vector<std::string>& cells, size_t col, size_t line_no,
                   const std::string& name) {
  double value = 0.0;
  check(col < cells.size() && parse_double(cells[col], &value), ErrorKind::kData,
        "line " + std::to_string(line_no) + ": cannot parse column '" + name + "' as a number");
  return value;
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string current;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  cells.push_back(std::move(current));
  return cells;
}

Dataset load_csv(const std::string& path, const DatasetSchema& schema, RowErrorPolicy policy,
                 CsvLoadStats* stats) {
  schema.validate();
  std::ifstream in = open_input(path);
  const Header header = read_header(in, path);

  std::vector<size_t> feature_cols;
  for (const auto& f : schema.features) feature_cols.push_back(header.require(f.name, path));
  const size_t base_col = header.require(schema.base_treatment, path);
  std::optional<size_t> secondary_col;
  if (!schema.secondary_treatment.empty())
    secondary_col = header.require(schema.secondary_treatment, path);
  std::vector<size_t> outcome_cols;
  for (const auto& o : schema.outcomes) outcome_cols.push_back(header.require(o, path));

  std::vector<Sample> samples;
  CsvLoadStats local;
  std::string line;
  size_t line_no = 1;
  int max_secondary = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++local.rows_read;
    try {
      const auto cells = split_csv_line(line);
      Sample s;
      s.x.reserve(feature_cols.size());
      for (size_t j = 0; j < feature_cols.size(); ++j)
        s.x.push_back(cell_double(cells, feature_cols[j], line_no, schema.features[j].name));
      const double base = cell_double(cells, base_col, line_no, schema.base_treatment);
      check(base == 0.0 || base == 1.0, ErrorKind::kData,
            "line " + std::to_string(line_no) + ": base treatment must be 0 or 1");
      s.base = static_cast<int>(base);
      if (secondary_col) {
        const std::string_view cell =
            *secondary_col < cells.size() ? trim(cells[*secondary_col]) : std::string_view();
        long long value = kNoTreatment;
        if (!cell.empty()) {
          check(parse_int(cell, &value), ErrorKind::kData,
                "line " + std::to_string(line_no) + ": cannot parse column '" +
                    schema.secondary_treatment + "' as an integer");
        }
        s.secondary = s.base == 1 ? static_cast<int>(value) : kNoTreatment;
        check(s.base == 0 || s.secondary >= 0, ErrorKind::kData,
              "line " + std::to_string(line_no) + ": treated row without a secondary treatment");
        check(schema.num_treatments == 0 ||
                  s.secondary < static_cast<int>(schema.num_treatments),
              ErrorKind::kData,
              "line " + std::to_string(line_no) + ": secondary treatment " +
                  std::to_string(s.secondary) + " outside the schema's treatment count");
      } else {
        s.secondary = s.base == 1 ? 0 : kNoTreatment;
      }
      for (size_t k = 0; k < outcome_cols.size(); ++k)
        s.y.push_back(cell_double(cells, outcome_cols[k], line_no, schema.outcomes[k]));
      max_secondary = std::max(max_secondary, s.secondary);
      samples.push_back(std::move(s));
    } catch (const Error& e) {
      if (policy == RowErrorPolicy::kAbort) throw;
      ++local.rows_skipped;
    }
  }

  size_t num_treatments = schema.num_treatments;
  if (num_treatments == 0) num_treatments = static_cast<size_t>(std::max(max_secondary, 0)) + 1;
  Dataset data(schema, num_treatments);
  data.reserve(samples.size());
  for (const auto& s : samples) data.add(s);
  if (stats != nullptr) *stats = local;
  return data;
}

Matrix load_feature_csv(const std::string& path, const DatasetSchema& schema) {
  std::ifstream in = open_input(path);
  const Header header = read_header(in, path);
  std::vector<size_t> cols;
  for (const auto& f : schema.features) cols.push_back(header.require(f.name, path));
  std::vector<double> values;
  std::string line;
  size_t line_no = 1;
  size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    for (size_t j = 0; j < cols.size(); ++j)
      values.push_back(cell_double(cells, cols[j], line_no, schema.features[j].name));
    ++rows;
  }
  return Matrix(rows, cols.size(), std::move(values));
}

void write_csv(const std::string& path, const Dataset& data) {
  const DatasetSchema& schema = data.schema();
  std::ofstream out = open_output(path);
  for (const auto& f : schema.features) out << f.name << ',';
  out << schema.base_treatment;
  if (!schema.secondary_treatment.empty()) out << ',' << schema.secondary_treatment;
  for (const auto& o : schema.outcomes) out << ',' << o;
  out << '\n';
  for (size_t i = 0; i < data.size(); ++i) {
    for (double v : data.features(i)) out << format_double(v) << ',';
    out << data.base(i);
    if (!schema.secondary_treatment.empty()) {
      out << ',';
      if (data.secondary(i) != kNoTreatment) out << data.secondary(i);
    }
    for (size_t k = 0; k < data.num_tasks(); ++k) out << ',' << format_double(data.outcome(i, k));
    out << '\n';
  }
  check(out.good(), ErrorKind::kIo, "write to '" + path + "' failed");
}

void write_feature_csv(const std::string& path, const Dataset& data) {
  std::ofstream out = open_output(path);
  const auto& features = data.schema().features;
  for (size_t j = 0; j < features.size(); ++j) out << (j ? "," : "") << features[j].name;
  out << '\n';
  for (size_t i = 0; i < data.size(); ++i) {
    const auto x = data.features(i);
    for (size_t j = 0; j < x.size(); ++j) out << (j ? "," : "") << format_double(x[j]);
    out << '\n';
  }
  check(out.good(), ErrorKind::kIo, "write to '" + path + "' failed");
}

void write_oracle_csv(const std::string& path, const OracleIte& oracle) {
  std::ofstream out = open_output(path);
  out << "row";
  for (size_t k = 0; k < oracle.num_tasks; ++k) out << ",tau_base_k" << k;
  for (size_t k = 0; k < oracle.num_tasks; ++k)
    for (size_t t = 0; t < oracle.num_treatments; ++t) out << ",tau_inc_k" << k << "_t" << t;
  out << '\n';
  for (size_t i = 0; i < oracle.size(); ++i) {
    out << i;
    for (double v : oracle.base.row(i)) out << ',' << format_double(v);
    for (double v : oracle.incremental.row(i)) out << ',' << format_double(v);
    out << '\n';
  }
  check(out.good(), ErrorKind::kIo, "write to '" + path + "' failed");
}

OracleIte load_oracle_csv(const std::string& path, size_t num_tasks, size_t num_treatments) {
  std::ifstream in = open_input(path);
  const Header header = read_header(in, path);
  std::vector<size_t> base_cols;
  std::vector<size_t> inc_cols;
  for (size_t k = 0; k < num_tasks; ++k)
    base_cols.push_back(header.require("tau_base_k" + std::to_string(k), path));
  for (size_t k = 0; k < num_tasks; ++k)
    for (size_t t = 0; t < num_treatments; ++t)
      inc_cols.push_back(
          header.require("tau_inc_k" + std::to_string(k) + "_t" + std::to_string(t), path));
  const size_t row_col = header.require("row", path);

  std::vector<double> base;
  std::vector<double> inc;
  std::string line;
  size_t line_no = 1;
  size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    const double row = cell_double(cells, row_col, line_no, "row");
    check(row == static_cast<double>(rows), ErrorKind::kData,
          "line " + std::to_string(line_no) + ": oracle rows must be consecutive from 0");
    for (size_t c : base_cols) base.push_back(cell_double(cells, c, line_no, "tau_base"));
    for (size_t c : inc_cols) inc.push_back(cell_double(cells, c, line_no, "tau_inc"));
    ++rows;
  }
  OracleIte oracle;
  oracle.num_tasks = num_tasks;
  oracle.num_treatments = num_treatments;
  oracle.base = Matrix(rows, num_tasks, std::move(base));
  oracle.incremental = Matrix(rows, num_tasks * num_treatments, std::move(inc));
  return oracle;
}

}  // namespace mtmt::data
