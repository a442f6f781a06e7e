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

#ifndef CORRDP_MECHANISMS_HPP_
#define CORRDP_MECHANISMS_HPP_

#include <Eigen/Core>
#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "corrdp/dataset.hpp"
#include "corrdp/errors.hpp"
#include "corrdp/random.hpp"
#include "corrdp/tv_estimation.hpp"

namespace corrdp {

// l1, per-coordinate, and correlated sensitivities of a query.  Always
// correlated <= l1 <= sum of per-coordinate values.
struct SensitivityReport {
  Eigen::VectorXd per_coordinate;
  double l1 = 0;
  double correlated = 0;
};

// Coordinate-separable query: coordinate k reads only feature column k.
// Built-ins are per-column means over [0, 1]-bounded data (per-coordinate
// sensitivity 1/n) and per-column sums of [0, 1]-bounded data (sensitivity
// 1).  Arbitrary queries supply their own per-coordinate sensitivities, which
// the caller is responsible for verifying.
struct QuerySpec {
  enum class Builtin { kColumnMean, kColumnSum, kCustom };
  Builtin builtin = Builtin::kColumnMean;
  std::vector<int> columns;              // feature column per output coordinate
  Eigen::VectorXd declared_sensitivity;  // used when builtin == kCustom
  double declared_l1 = -1;               // < 0 -> derive from the block structure

  int arity() const { return static_cast<int>(columns.size()); }

  Eigen::VectorXd Evaluate(const Dataset& d) const {
    Eigen::VectorXd out(arity());
    for (int k = 0; k < arity(); ++k) {
      const auto column = d.features.col(columns[static_cast<std::size_t>(k)]);
      out(k) = builtin == Builtin::kColumnSum ? column.sum() : column.mean();
    }
    return out;
  }

  Eigen::VectorXd PerCoordinateSensitivity(int n) const {
    if (builtin == Builtin::kCustom) {
      if (declared_sensitivity.size() != arity()) {
        throw ShapeError("declared sensitivities do not match query arity");
      }
      return declared_sensitivity;
    }
    const double per = builtin == Builtin::kColumnSum ? 1.0 : 1.0 / n;
    return Eigen::VectorXd::Constant(arity(), per);
  }
};

// Correlated sensitivity: the TV-weighted per-coordinate sum, capped by the
// l1 sensitivity.  A neighboring database changes one entry, and within it
// only sensitive or only insensitive features, so the derived l1 sensitivity
// of a coordinate-separable query is the larger of the two block sums.
inline SensitivityReport CorrelatedSensitivity(const QuerySpec& query,
                                               const FeaturePartition& part,
                                               const TVProfile& tv, int n) {
  if (n < 1) throw ParameterError("row count must be positive");
  SensitivityReport report;
  report.per_coordinate = query.PerCoordinateSensitivity(n);
  double sensitive_sum = 0;
  double insensitive_sum = 0;
  double weighted = 0;
  for (int k = 0; k < query.arity(); ++k) {
    const int column = query.columns[static_cast<std::size_t>(k)];
    const double delta_k = report.per_coordinate(k);
    if (delta_k < 0) throw ParameterError("negative coordinate sensitivity");
    if (part.IsSensitive(column)) {
      sensitive_sum += delta_k;
      weighted += delta_k;
    } else {
      const auto it = tv.values.find(column);
      if (it == tv.values.end()) {
        throw ProfileError("TV profile missing feature " +
                           std::to_string(column + 1));
      }
      insensitive_sum += delta_k;
      weighted += delta_k * it->second;
    }
  }
  report.l1 = query.declared_l1 >= 0
                  ? query.declared_l1
                  : std::max(sensitive_sum, insensitive_sum);
  report.correlated = std::min(weighted, report.l1);
  return report;
}

// Standard Laplace mechanism: i.i.d. Laplace(l1_sensitivity / epsilon) noise.
inline Eigen::VectorXd LaplaceStandard(const Eigen::VectorXd& values,
                                       double l1_sensitivity, double epsilon,
                                       RandomState& rng) {
  if (!(epsilon > 0)) throw ParameterError("epsilon must be positive");
  if (l1_sensitivity < 0) throw ParameterError("sensitivity must be >= 0");
  Eigen::VectorXd out = values;
  const double scale = l1_sensitivity / epsilon;
  if (scale == 0) return out;
  for (int k = 0; k < out.size(); ++k) out(k) += rng.Laplace(scale);
  return out;
}

// Correlation-aware Laplace mechanism: the noise scale uses the correlated
// sensitivity instead of the l1 sensitivity.
inline Eigen::VectorXd LaplaceCorrDp(const Eigen::VectorXd& values,
                                     const SensitivityReport& report,
                                     double epsilon, RandomState& rng) {
  return LaplaceStandard(values, report.correlated, epsilon, rng);
}

}  // namespace corrdp

#endif  // CORRDP_MECHANISMS_HPP_
