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

#ifndef CORRDP_DATASET_HPP_
#define CORRDP_DATASET_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "corrdp/errors.hpp"
#include "corrdp/random.hpp"

namespace corrdp {

// Row-major tabular data with a feature/label split.  Immutable after
// construction by convention; safe to share read-only across threads.
//
// Synthetic datasets are kept on their generator's raw scale.  Ingested CSV
// data arrives min-max scaled per column (see ingest.hpp), so every scaled
// feature column lies in [0, 1].
struct Dataset {
  Eigen::MatrixXd features;  // n x m
  Eigen::VectorXd labels;    // n

  int n() const { return static_cast<int>(features.rows()); }
  int m() const { return static_cast<int>(features.cols()); }

  void Validate() const {
    if (features.rows() < 1 || features.cols() < 1) {
      throw ShapeError("dataset must have at least one row and one column");
    }
    if (labels.size() != features.rows()) {
      throw ShapeError("label count does not match row count");
    }
    if (!features.allFinite() || !labels.allFinite()) {
      throw ShapeError("dataset contains non-finite values");
    }
  }
};

// Disjoint sensitive/insensitive index sets covering all m columns.
// Indices are 0-based internally; command-line surfaces print them 1-based.
struct FeaturePartition {
  std::vector<int> sensitive;
  std::vector<int> insensitive;

  int num_sensitive() const { return static_cast<int>(sensitive.size()); }

  bool IsSensitive(int index) const {
    return std::binary_search(sensitive.begin(), sensitive.end(), index);
  }

  // S = {0, ..., m_s - 1}, U = the rest.
  static FeaturePartition LeadingSensitive(int m, int m_s) {
    if (m_s < 0 || m_s > m) {
      throw SpecError("sensitive feature count must lie in [0, m]");
    }
    FeaturePartition part;
    for (int i = 0; i < m_s; ++i) part.sensitive.push_back(i);
    for (int i = m_s; i < m; ++i) part.insensitive.push_back(i);
    return part;
  }

  void Validate(int m) const {
    std::vector<bool> seen(static_cast<std::size_t>(m), false);
    auto mark = [&](const std::vector<int>& ids) {
      for (int i : ids) {
        if (i < 0 || i >= m) throw SpecError("feature index out of range");
        if (seen[static_cast<std::size_t>(i)]) {
          throw SpecError("feature index appears twice in the partition");
        }
        seen[static_cast<std::size_t>(i)] = true;
      }
    };
    mark(sensitive);
    mark(insensitive);
    for (bool b : seen) {
      if (!b) throw SpecError("partition does not cover every feature");
    }
    if (!std::is_sorted(sensitive.begin(), sensitive.end()) ||
        !std::is_sorted(insensitive.begin(), insensitive.end())) {
      throw SpecError("partition index sets must be sorted");
    }
  }
};

// Multivariate Gaussian feature model with a linear labeling rule:
//   x ~ N(mean, covariance),  y = theta_true . x + N(0, noise_std^2).
struct GaussianSpec {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd theta_true;
  double noise_std = 5.0;

  int m() const { return static_cast<int>(mean.size()); }

  // Positive definiteness is checked through the Cholesky factorization;
  // symmetry is required up to 1e-10.
  Eigen::MatrixXd CholeskyFactor() const {
    if (covariance.rows() != mean.size() ||
        covariance.cols() != mean.size() ||
        theta_true.size() != mean.size()) {
      throw SpecError("mean/covariance/theta dimensions disagree");
    }
    if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
      throw SpecError("covariance is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) {
      throw SpecError("covariance is not positive definite");
    }
    return llt.matrixL();
  }

  void Validate() const { (void)CholeskyFactor(); }
};

// Block covariance family used by the synthetic experiments: unit variance on
// sensitive coordinates, variance 2 on insensitive ones, 0.5 within either
// block, 0.1 across blocks; alternating-sign means and sqrt-growing
// parameters.  Sensitive features occupy the leading m_s indices.
inline GaussianSpec DefaultSyntheticSpec(int m, int m_s) {
  if (m < 1 || m_s < 1 || m_s > m) {
    throw SpecError("need 1 <= m_s <= m for the synthetic spec");
  }
  GaussianSpec spec;
  spec.mean.resize(m);
  spec.theta_true.resize(m);
  spec.covariance.resize(m, m);
  for (int i = 0; i < m; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;  // (-1)^(i+1), 1-based i
    spec.mean(i) = sign;
    spec.theta_true(i) = sign * std::sqrt(static_cast<double>(i) + 2.0);
  }
  for (int i = 0; i < m; ++i) {
    const bool si = i < m_s;
    for (int j = 0; j < m; ++j) {
      const bool sj = j < m_s;
      if (i == j) {
        spec.covariance(i, j) = si ? 1.0 : 2.0;
      } else if (si == sj) {
        spec.covariance(i, j) = 0.5;
      } else {
        spec.covariance(i, j) = 0.1;
      }
    }
  }
  spec.noise_std = 5.0;
  return spec;
}

// Draws n i.i.d. rows from the spec; deterministic for a fixed stream.
inline Dataset GenerateSynthetic(const GaussianSpec& spec, int n,
                                 RandomState& rng) {
  if (n < 1) throw SpecError("sample count must be positive");
  const Eigen::MatrixXd chol = spec.CholeskyFactor();
  const int m = spec.m();
  Dataset out;
  out.features.resize(n, m);
  out.labels.resize(n);
  Eigen::VectorXd z(m);
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < m; ++j) z(j) = rng.Normal();
    out.features.row(r) = (spec.mean + chol * z).transpose();
    out.labels(r) = out.features.row(r).dot(spec.theta_true) +
                    spec.noise_std * rng.Normal();
  }
  return out;
}

// Largest feature-row L2 norm, the norm bound used by noise calibration.
inline double FeatureBound(const Dataset& d) {
  d.Validate();
  return std::sqrt(d.features.rowwise().squaredNorm().maxCoeff());
}

}  // namespace corrdp

#endif  // CORRDP_DATASET_HPP_
