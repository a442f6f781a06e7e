//
// Copyright 2026 The CorrDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef CORRDP_INGEST_HPP_
#define CORRDP_INGEST_HPP_

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "corrdp/dataset.hpp"
#include "corrdp/errors.hpp"

namespace corrdp {

enum class ColumnType { kContinuous, kCategorical };
enum class Sensitivity { kSensitive, kInsensitive };

struct ColumnSpec {
  ColumnType type = ColumnType::kContinuous;
  Sensitivity sensitivity = Sensitivity::kInsensitive;
  // Optional closed category list; a cell outside it is an ingest error.
  std::vector<std::string> allowed_categories;
};

struct CsvSchema {
  std::string label_column;
  std::map<std::string, ColumnSpec> columns;
};

// How encoded columns map back to the raw header.  All one-hot columns of a
// raw categorical feature form one group and share its sensitivity class.
struct FeatureInfo {
  struct Group {
    std::string raw_name;
    bool categorical = false;
    std::vector<int> columns;             // encoded column indices
    std::vector<std::string> categories;  // for categorical groups
  };
  std::vector<std::string> column_names;  // encoded column names
  std::vector<int> group_of;              // encoded column -> group id
  std::vector<Group> groups;              // raw header order
};

struct IngestResult {
  Dataset dataset;
  FeaturePartition partition;
  FeatureInfo info;
};

namespace internal {

inline std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream stream(line);
  while (std::getline(stream, cell, ',')) {
    // Trim surrounding whitespace and CR.
    const auto begin = cell.find_first_not_of(" \t\r");
    const auto end = cell.find_last_not_of(" \t\r");
    cells.push_back(begin == std::string::npos
                        ? std::string()
                        : cell.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double ParseNumeric(const std::string& cell, int row,
                           const std::string& column) {
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != cell.size() || cell.empty() || !std::isfinite(value)) {
    throw IngestError("non-numeric continuous cell '" + cell + "' at row " +
                      std::to_string(row) + ", column '" + column + "'");
  }
  return value;
}

}  // namespace internal

// Reads a comma-separated file (first row header, '.' decimal point).
// Continuous columns are min-max scaled to [0, 1]; a constant column maps to
// 0.  Categorical columns are one-hot encoded in first-seen category order,
// and every one-hot column inherits the raw column's sensitivity class.
// Header order is preserved in the encoded index mapping.
inline IngestResult IngestCsv(const std::string& path,
                              const CsvSchema& schema) {
  std::ifstream file(path);
  if (!file) throw IngestError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(file, line)) throw IngestError("empty file: " + path);
  const std::vector<std::string> header = internal::SplitCsvLine(line);

  if (schema.label_column.empty()) {
    throw IngestError("schema does not name a label column");
  }
  if (schema.columns.count(schema.label_column) > 0) {
    throw IngestError("label column '" + schema.label_column +
                      "' is also declared as a feature");
  }

  int label_index = -1;
  std::vector<const ColumnSpec*> specs(header.size(), nullptr);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == schema.label_column) {
      label_index = static_cast<int>(c);
      continue;
    }
    const auto it = schema.columns.find(header[c]);
    if (it == schema.columns.end()) {
      throw IngestError("header column '" + header[c] +
                        "' missing from the schema");
    }
    specs[c] = &it->second;
  }
  if (label_index < 0) {
    throw IngestError("label column '" + schema.label_column +
                      "' not present in the header");
  }
  for (const auto& [name, unused_spec] : schema.columns) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw IngestError("schema column '" + name + "' missing from the file");
    }
  }

  std::vector<std::vector<std::string>> rows;
  int row_number = 1;
  while (std::getline(file, line)) {
    ++row_number;
    if (line.empty()) continue;
    std::vector<std::string> cells = internal::SplitCsvLine(line);
    if (cells.size() != header.size()) {
      throw IngestError("row " + std::to_string(row_number) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(header.size()));
    }
    rows.push_back(std::move(cells));
  }
  const int n = static_cast<int>(rows.size());
  if (n < 1) throw IngestError("no data rows in " + path);

  IngestResult out;
  std::vector<std::vector<double>> encoded;  // column-major
  std::vector<Sensitivity> column_class;

  for (std::size_t c = 0; c < header.size(); ++c) {
    if (static_cast<int>(c) == label_index) continue;
    const ColumnSpec& spec = *specs[c];
    FeatureInfo::Group group;
    group.raw_name = header[c];
    if (spec.type == ColumnType::kContinuous) {
      std::vector<double> column(static_cast<std::size_t>(n));
      for (int r = 0; r < n; ++r) {
        column[static_cast<std::size_t>(r)] = internal::ParseNumeric(
            rows[static_cast<std::size_t>(r)][c], r + 2, header[c]);
      }
      const auto [lo_it, hi_it] = std::minmax_element(column.begin(),
                                                      column.end());
      const double lo = *lo_it;
      const double range = *hi_it - lo;
      for (double& v : column) v = range > 0 ? (v - lo) / range : 0.0;
      group.categorical = false;
      group.columns.push_back(static_cast<int>(encoded.size()));
      out.info.column_names.push_back(header[c]);
      column_class.push_back(spec.sensitivity);
      encoded.push_back(std::move(column));
    } else {
      std::vector<std::string> categories;  // first-seen order
      std::vector<int> codes(static_cast<std::size_t>(n));
      for (int r = 0; r < n; ++r) {
        const std::string& cell = rows[static_cast<std::size_t>(r)][c];
        if (!spec.allowed_categories.empty() &&
            std::find(spec.allowed_categories.begin(),
                      spec.allowed_categories.end(),
                      cell) == spec.allowed_categories.end()) {
          throw IngestError("unseen category '" + cell + "' at row " +
                            std::to_string(r + 2) + ", column '" + header[c] +
                            "'");
        }
        auto it = std::find(categories.begin(), categories.end(), cell);
        if (it == categories.end()) {
          categories.push_back(cell);
          it = std::prev(categories.end());
        }
        codes[static_cast<std::size_t>(r)] =
            static_cast<int>(it - categories.begin());
      }
      group.categorical = true;
      group.categories = categories;
      for (std::size_t k = 0; k < categories.size(); ++k) {
        std::vector<double> column(static_cast<std::size_t>(n), 0.0);
        for (int r = 0; r < n; ++r) {
          if (codes[static_cast<std::size_t>(r)] == static_cast<int>(k)) {
            column[static_cast<std::size_t>(r)] = 1.0;
          }
        }
        group.columns.push_back(static_cast<int>(encoded.size()));
        out.info.column_names.push_back(header[c] + "=" + categories[k]);
        column_class.push_back(spec.sensitivity);
        encoded.push_back(std::move(column));
      }
    }
    out.info.groups.push_back(std::move(group));
  }

  const int m = static_cast<int>(encoded.size());
  out.dataset.features.resize(n, m);
  for (int j = 0; j < m; ++j) {
    for (int r = 0; r < n; ++r) {
      out.dataset.features(r, j) =
          encoded[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)];
    }
  }
  out.dataset.labels.resize(n);
  for (int r = 0; r < n; ++r) {
    out.dataset.labels(r) = internal::ParseNumeric(
        rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(
            label_index)],
        r + 2, schema.label_column);
  }
  out.dataset.Validate();

  out.info.group_of.resize(static_cast<std::size_t>(m));
  for (std::size_t g = 0; g < out.info.groups.size(); ++g) {
    for (int col : out.info.groups[g].columns) {
      out.info.group_of[static_cast<std::size_t>(col)] = static_cast<int>(g);
    }
  }
  for (int j = 0; j < m; ++j) {
    if (column_class[static_cast<std::size_t>(j)] == Sensitivity::kSensitive) {
      out.partition.sensitive.push_back(j);
    } else {
      out.partition.insensitive.push_back(j);
    }
  }
  out.partition.Validate(m);
  return out;
}

// Writes the numeric matrix back out with round-trippable precision.
inline void ExportCsv(const Dataset& d, const std::vector<std::string>& names,
                      const std::string& label_name, const std::string& path) {
  if (static_cast<int>(names.size()) != d.m()) {
    throw ShapeError("column name count does not match feature count");
  }
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw IngestError("cannot write '" + path + "'");
  for (int j = 0; j < d.m(); ++j) {
    std::fprintf(f, "%s,", names[static_cast<std::size_t>(j)].c_str());
  }
  std::fprintf(f, "%s\n", label_name.c_str());
  for (int r = 0; r < d.n(); ++r) {
    for (int j = 0; j < d.m(); ++j) {
      std::fprintf(f, "%.17g,", d.features(r, j));
    }
    std::fprintf(f, "%.17g\n", d.labels(r));
  }
  std::fclose(f);
}

}  // namespace corrdp

#endif  // CORRDP_INGEST_HPP_
