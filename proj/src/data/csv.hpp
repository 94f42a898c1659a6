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

#ifndef MTMT_DATA_CSV_HPP_
#define MTMT_DATA_CSV_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "data/dataset.hpp"

namespace mtmt::data {

enum class RowErrorPolicy { kAbort, kSkip };

struct CsvLoadStats {
  size_t rows_read = 0;
  size_t rows_skipped = 0;
};

std::vector<std::string> split_csv_line(std::string_view line);

// Maps columns by header name according to `schema`. When the schema has no
// secondary column the data is single-treatment and treated rows get index 0.
// A missing column is a schema error; a bad cell is a data error carrying the
// line number, or the row is dropped under kSkip.
Dataset load_csv(const std::string& path, const DatasetSchema& schema,
                 RowErrorPolicy policy = RowErrorPolicy::kAbort, CsvLoadStats* stats = nullptr);

// Feature columns only, in schema order (for scoring new users).
Matrix load_feature_csv(const std::string& path, const DatasetSchema& schema);

void write_csv(const std::string& path, const Dataset& data);
void write_feature_csv(const std::string& path, const Dataset& data);

// Columns: row, tau_base_k<k>..., tau_inc_k<k>_t<t>...
void write_oracle_csv(const std::string& path, const OracleIte& oracle);
OracleIte load_oracle_csv(const std::string& path, size_t num_tasks, size_t num_treatments);

}  // namespace mtmt::data

#endif  // MTMT_DATA_CSV_HPP_
