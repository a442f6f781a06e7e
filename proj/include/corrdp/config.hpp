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

#ifndef CORRDP_CONFIG_HPP_
#define CORRDP_CONFIG_HPP_

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "corrdp/errors.hpp"
#include "corrdp/ingest.hpp"
#include "corrdp/losses.hpp"
#include "corrdp/optimizer.hpp"
#include "corrdp/tv_estimation.hpp"

namespace corrdp {

// Minimal INI reader: [section] headers, key = value lines, '#' or ';'
// comments.  Keys are addressed as "section.key".
class IniFile {
 public:
  static IniFile Load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    IniFile ini;
    std::string line;
    std::string section;
    int line_number = 0;
    while (std::getline(in, line)) {
      ++line_number;
      const std::string trimmed = Trim(StripComment(line));
      if (trimmed.empty()) continue;
      if (trimmed.front() == '[') {
        if (trimmed.back() != ']') {
          throw ConfigError("bad section header at line " +
                            std::to_string(line_number));
        }
        section = Trim(trimmed.substr(1, trimmed.size() - 2));
        continue;
      }
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("expected key = value at line " +
                          std::to_string(line_number));
      }
      const std::string key = Trim(trimmed.substr(0, eq));
      const std::string value = Trim(trimmed.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError("empty key at line " + std::to_string(line_number));
      }
      ini.entries_[section.empty() ? key : section + "." + key] = value;
    }
    return ini;
  }

  bool Has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string GetString(const std::string& key,
                        const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
  }

  std::string Require(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
      throw ConfigError("missing required config key '" + key + "'");
    }
    return it->second;
  }

  double GetDouble(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : ParseDouble(it->second, key);
  }

  std::int64_t GetInt(const std::string& key, std::int64_t fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
      std::size_t used = 0;
      const std::int64_t v = std::stoll(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(key);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' is not an integer: " + it->second);
    }
  }

  bool GetBool(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("key '" + key + "' is not a boolean: " + it->second);
  }

  std::vector<std::string> GetList(const std::string& key) const {
    std::vector<std::string> out;
    const auto it = entries_.find(key);
    if (it == entries_.end()) return out;
    std::stringstream stream(it->second);
    std::string item;
    while (std::getline(stream, item, ',')) {
      const std::string t = Trim(item);
      if (!t.empty()) out.push_back(t);
    }
    return out;
  }

  std::vector<double> GetDoubleList(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : GetList(key)) {
      out.push_back(ParseDouble(item, key));
    }
    return out;
  }

  std::vector<std::uint64_t> GetSeedList(const std::string& key) const {
    std::vector<std::uint64_t> out;
    for (const std::string& item : GetList(key)) {
      try {
        out.push_back(std::stoull(item));
      } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' has a bad seed: " + item);
      }
    }
    return out;
  }

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

 private:
  static std::string StripComment(const std::string& line) {
    const auto pos = line.find_first_of("#;");
    return pos == std::string::npos ? line : line.substr(0, pos);
  }
  static std::string Trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    const auto end = s.find_last_not_of(" \t\r");
    return begin == std::string::npos ? std::string()
                                      : s.substr(begin, end - begin + 1);
  }
  static double ParseDouble(const std::string& value, const std::string& key) {
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(key);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' is not a number: " + value);
    }
  }

  std::map<std::string, std::string> entries_;
};

struct DatasetSection {
  std::string kind = "synthetic";  // synthetic | csv
  int m = 100;
  int m_s = 10;
  int n = 2000;
  double noise_std = 5.0;
  std::uint64_t seed = 42;
  std::string csv_path;
  std::string schema_path;
};

struct TvSection {
  std::string strategy = "exact";  // estimator name | frozen
  double c2 = 1.0;
  double gamma = 0.5;
  double delta = 1e-4;
  bool adjust = false;
  int histogram_bins = 0;
  std::string profile_path;  // frozen profile input
};

struct TrainSection {
  LossKind loss = LossKind::kRidge;
  double ridge_lambda = 1.0;
  std::vector<Method> methods;
  Method method = Method::kNonPrivate;  // for single-run training
  std::vector<double> eps_grid;
  double epsilon = 1.0;
  double delta = 1e-4;
  int iterations = 4000;
  int batch = 0;
  std::string step_rule = "constant";  // constant | decay
  double alpha = 0.001;
  double lipschitz = 1.0;    // 0 -> derive from data
  double param_bound = 0.0;  // projection radius; required for decay
  double boundary_c = 1.0;
  bool include_norm_bound = true;
  std::optional<double> clip;
  std::vector<std::uint64_t> seeds;
};

struct OutputSection {
  std::string directory = "out";
  bool emit_trace = false;
};

struct CertifySection {
  std::string profile_path;   // frozen TV profile for calibration
  std::string noise_path;     // optional precomputed noise profile
  Method method = Method::kCorrDp;
  double epsilon = 0.5;
  double delta = 1e-4;
  double lipschitz = 1.0;
  double feature_bound = 0.0;  // 0 -> compute from data
  double direct_coeff = M_SQRT2;
  double cross_coeff = M_SQRT2;
  double distance_floor = 1e-6;
  int iterations = 4000;
};

struct ExperimentConfig {
  DatasetSection dataset;
  TvSection tv;
  TrainSection train;
  OutputSection output;
  CertifySection certify;
  int jobs = 0;

  static ExperimentConfig Load(const std::string& path) {
    const IniFile ini = IniFile::Load(path);
    ExperimentConfig cfg;

    cfg.dataset.kind = ini.GetString("dataset.kind", cfg.dataset.kind);
    cfg.dataset.m = static_cast<int>(ini.GetInt("dataset.m", cfg.dataset.m));
    cfg.dataset.m_s =
        static_cast<int>(ini.GetInt("dataset.m_s", cfg.dataset.m_s));
    cfg.dataset.n = static_cast<int>(ini.GetInt("dataset.n", cfg.dataset.n));
    cfg.dataset.noise_std =
        ini.GetDouble("dataset.noise_std", cfg.dataset.noise_std);
    cfg.dataset.seed = static_cast<std::uint64_t>(
        ini.GetInt("dataset.seed", static_cast<std::int64_t>(cfg.dataset.seed)));
    cfg.dataset.csv_path = ini.GetString("dataset.path", "");
    cfg.dataset.schema_path = ini.GetString("dataset.schema", "");
    if (cfg.dataset.kind != "synthetic" && cfg.dataset.kind != "csv") {
      throw ConfigError("dataset.kind must be 'synthetic' or 'csv'");
    }

    cfg.tv.strategy = ini.GetString("tv.strategy", cfg.tv.strategy);
    cfg.tv.c2 = ini.GetDouble("tv.c2", cfg.tv.c2);
    cfg.tv.gamma = ini.GetDouble("tv.gamma", cfg.tv.gamma);
    cfg.tv.delta = ini.GetDouble("tv.delta", cfg.tv.delta);
    cfg.tv.adjust = ini.GetBool("tv.adjust", cfg.tv.adjust);
    cfg.tv.histogram_bins =
        static_cast<int>(ini.GetInt("tv.histogram_bins", 0));
    cfg.tv.profile_path = ini.GetString("tv.profile", "");

    cfg.train.loss = LossKindFromString(ini.GetString("train.loss", "ridge"));
    cfg.train.ridge_lambda =
        ini.GetDouble("train.ridge_lambda", cfg.train.ridge_lambda);
    for (const std::string& name : ini.GetList("train.methods")) {
      cfg.train.methods.push_back(MethodFromString(name));
    }
    if (ini.Has("train.method")) {
      cfg.train.method = MethodFromString(ini.Require("train.method"));
    } else if (!cfg.train.methods.empty()) {
      cfg.train.method = cfg.train.methods.front();
    }
    cfg.train.eps_grid = ini.GetDoubleList("train.eps_grid");
    cfg.train.epsilon = ini.GetDouble(
        "train.epsilon",
        cfg.train.eps_grid.empty() ? 1.0 : cfg.train.eps_grid.front());
    cfg.train.delta = ini.GetDouble("train.delta", cfg.train.delta);
    cfg.train.iterations =
        static_cast<int>(ini.GetInt("train.T", cfg.train.iterations));
    cfg.train.batch = static_cast<int>(ini.GetInt("train.batch", 0));
    cfg.train.step_rule =
        ini.GetString("train.step_rule", cfg.train.step_rule);
    cfg.train.alpha = ini.GetDouble("train.alpha", cfg.train.alpha);
    cfg.train.lipschitz =
        ini.GetDouble("train.lipschitz", cfg.train.lipschitz);
    cfg.train.param_bound =
        ini.GetDouble("train.param_bound", cfg.train.param_bound);
    cfg.train.boundary_c =
        ini.GetDouble("train.boundary_c", cfg.train.boundary_c);
    cfg.train.include_norm_bound =
        ini.GetBool("train.include_norm_bound", true);
    if (ini.Has("train.clip")) {
      cfg.train.clip = ini.GetDouble("train.clip", 0.0);
    }
    cfg.train.seeds = ini.GetSeedList("train.seeds");
    if (cfg.train.step_rule != "constant" && cfg.train.step_rule != "decay") {
      throw ConfigError("train.step_rule must be 'constant' or 'decay'");
    }
    if (!std::is_sorted(cfg.train.eps_grid.begin(),
                        cfg.train.eps_grid.end())) {
      throw ConfigError("train.eps_grid must be sorted ascending");
    }
    for (double eps : cfg.train.eps_grid) {
      if (!(eps > 0)) throw ConfigError("train.eps_grid must be positive");
    }

    cfg.output.directory = ini.GetString("output.dir", cfg.output.directory);
    cfg.output.emit_trace = ini.GetBool("output.emit_trace", false);

    cfg.certify.profile_path = ini.GetString("certify.profile", "");
    cfg.certify.noise_path = ini.GetString("certify.noise", "");
    cfg.certify.method = MethodFromString(
        ini.GetString("certify.method", "corrdp"));
    cfg.certify.epsilon = ini.GetDouble("certify.epsilon", cfg.certify.epsilon);
    cfg.certify.delta = ini.GetDouble("certify.delta", cfg.certify.delta);
    cfg.certify.lipschitz =
        ini.GetDouble("certify.lipschitz", cfg.certify.lipschitz);
    cfg.certify.feature_bound =
        ini.GetDouble("certify.feature_bound", cfg.certify.feature_bound);
    cfg.certify.direct_coeff =
        ini.GetDouble("certify.direct_coeff", cfg.certify.direct_coeff);
    cfg.certify.cross_coeff =
        ini.GetDouble("certify.cross_coeff", cfg.certify.cross_coeff);
    cfg.certify.distance_floor =
        ini.GetDouble("certify.distance_floor", cfg.certify.distance_floor);
    cfg.certify.iterations =
        static_cast<int>(ini.GetInt("certify.T", cfg.certify.iterations));

    cfg.jobs = static_cast<int>(ini.GetInt("output.jobs", 0));
    return cfg;
  }
};

// Schema files share the INI format: a [schema] section naming the label and
// one [column.<name>] section per feature column.
inline CsvSchema LoadSchema(const std::string& path) {
  const IniFile ini = IniFile::Load(path);
  CsvSchema schema;
  schema.label_column = ini.GetString("schema.label", "");
  if (schema.label_column.empty()) {
    throw ConfigError("schema file must set schema.label");
  }
  for (const auto& [key, value] : ini.entries()) {
    constexpr const char* kPrefix = "column.";
    if (key.rfind(kPrefix, 0) != 0) continue;
    const auto rest = key.substr(7);
    const auto dot = rest.rfind('.');
    if (dot == std::string::npos) {
      throw ConfigError("bad schema key '" + key + "'");
    }
    const std::string column = rest.substr(0, dot);
    const std::string field = rest.substr(dot + 1);
    ColumnSpec& spec = schema.columns[column];
    if (field == "type") {
      if (value == "continuous") spec.type = ColumnType::kContinuous;
      else if (value == "categorical") spec.type = ColumnType::kCategorical;
      else throw ConfigError("column '" + column + "': bad type " + value);
    } else if (field == "sensitivity") {
      if (value == "sensitive") spec.sensitivity = Sensitivity::kSensitive;
      else if (value == "insensitive") {
        spec.sensitivity = Sensitivity::kInsensitive;
      } else {
        throw ConfigError("column '" + column + "': bad sensitivity " + value);
      }
    } else if (field == "categories") {
      std::stringstream stream(value);
      std::string item;
      while (std::getline(stream, item, ',')) {
        const auto begin = item.find_first_not_of(" \t");
        const auto end = item.find_last_not_of(" \t");
        if (begin != std::string::npos) {
          spec.allowed_categories.push_back(
              item.substr(begin, end - begin + 1));
        }
      }
    } else {
      throw ConfigError("unknown schema field '" + field + "' for column '" +
                        column + "'");
    }
  }
  if (schema.columns.empty()) {
    throw ConfigError("schema file declares no columns");
  }
  return schema;
}

}  // namespace corrdp

#endif  // CORRDP_CONFIG_HPP_
