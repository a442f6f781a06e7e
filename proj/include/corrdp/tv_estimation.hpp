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

#ifndef CORRDP_TV_ESTIMATION_HPP_
#define CORRDP_TV_ESTIMATION_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "corrdp/dataset.hpp"
#include "corrdp/distribution.hpp"
#include "corrdp/errors.hpp"
#include "corrdp/ingest.hpp"
#include "corrdp/math_util.hpp"

namespace corrdp {

enum class TvKind { kExact, kEmpirical, kConfidenceAdjusted };

inline std::string ToString(TvKind kind) {
  switch (kind) {
    case TvKind::kExact: return "exact";
    case TvKind::kEmpirical: return "empirical";
    case TvKind::kConfidenceAdjusted: return "confidence_adjusted";
  }
  return "unknown";
}

// Per-insensitive-feature conditional total variation values, each in [0, 1].
// The per-feature value is the maximum over conditioning values of that one
// feature; maximizing over larger conditioning subsets is intentionally not
// implemented (single-feature conditioning is what the noise calibration and
// the experiment pipeline use).
struct TVProfile {
  std::map<int, double> values;  // insensitive column index -> TV
  TvKind kind = TvKind::kEmpirical;
  struct Meta {
    std::string estimator;
    double c2 = 1.0;      // estimator error constant
    double gamma = 0.5;   // estimator convergence-rate exponent
    double delta = 0.0;
    int n = 0;
    int m = 0;
    int m_s = 0;
  } meta;

  void CheckCovers(const FeaturePartition& part) const {
    if (values.size() != part.insensitive.size()) {
      throw ProfileError("TV profile has " + std::to_string(values.size()) +
                         " entries for " +
                         std::to_string(part.insensitive.size()) +
                         " insensitive features");
    }
    for (int u : part.insensitive) {
      const auto it = values.find(u);
      if (it == values.end()) {
        throw ProfileError("TV profile missing insensitive feature " +
                           std::to_string(u + 1));
      }
      if (!(it->second >= 0.0 && it->second <= 1.0)) {
        throw ProfileError("TV value out of [0, 1] for feature " +
                           std::to_string(u + 1));
      }
    }
  }

  static TVProfile Uniform(const FeaturePartition& part, double value,
                           TvKind kind = TvKind::kExact) {
    TVProfile p;
    p.kind = kind;
    for (int u : part.insensitive) p.values[u] = Clamp01(value);
    return p;
  }
};

namespace internal {

// Dense category codes for one column, in first-seen order.
inline std::vector<int> CodeColumn(const Eigen::VectorXd& column,
                                   int* num_categories) {
  std::map<double, int> ids;
  std::vector<int> codes(static_cast<std::size_t>(column.size()));
  for (int r = 0; r < column.size(); ++r) {
    auto [it, unused] = ids.try_emplace(column(r), static_cast<int>(ids.size()));
    codes[static_cast<std::size_t>(r)] = it->second;
  }
  *num_categories = static_cast<int>(ids.size());
  return codes;
}

// Joint category codes over a set of columns.
inline std::vector<int> CodeColumns(const Dataset& d,
                                    const std::vector<int>& columns,
                                    int* num_categories) {
  std::map<std::vector<double>, int> ids;
  std::vector<int> codes(static_cast<std::size_t>(d.n()));
  std::vector<double> key(columns.size());
  for (int r = 0; r < d.n(); ++r) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      key[k] = d.features(r, columns[k]);
    }
    auto [it, unused] = ids.try_emplace(key, static_cast<int>(ids.size()));
    codes[static_cast<std::size_t>(r)] = it->second;
  }
  *num_categories = static_cast<int>(ids.size());
  return codes;
}

// Plug-in TV between empirical conditionals of `value_codes` given
// `condition_codes`: max over conditioning pairs of half the L1 distance.
inline double DiscretePluginFromCodes(const std::vector<int>& value_codes,
                                      int num_values,
                                      const std::vector<int>& condition_codes,
                                      int num_conditions) {
  const int n = static_cast<int>(value_codes.size());
  std::vector<std::vector<double>> counts(
      static_cast<std::size_t>(num_conditions),
      std::vector<double>(static_cast<std::size_t>(num_values), 0.0));
  std::vector<double> totals(static_cast<std::size_t>(num_conditions), 0.0);
  for (int r = 0; r < n; ++r) {
    counts[static_cast<std::size_t>(condition_codes[static_cast<std::size_t>(
        r)])][static_cast<std::size_t>(value_codes[static_cast<std::size_t>(r)])]
        += 1.0;
    totals[static_cast<std::size_t>(
        condition_codes[static_cast<std::size_t>(r)])] += 1.0;
  }
  for (int j = 0; j < num_conditions; ++j) {
    if (totals[static_cast<std::size_t>(j)] <= 0) {
      throw ConditioningUnsupported("conditioning category " +
                                    std::to_string(j) + " has no samples");
    }
  }
  double best = 0.0;
  for (int j1 = 0; j1 < num_conditions; ++j1) {
    for (int j2 = j1 + 1; j2 < num_conditions; ++j2) {
      double l1 = 0.0;
      for (int i = 0; i < num_values; ++i) {
        l1 += std::abs(
            counts[static_cast<std::size_t>(j1)][static_cast<std::size_t>(i)] /
                totals[static_cast<std::size_t>(j1)] -
            counts[static_cast<std::size_t>(j2)][static_cast<std::size_t>(i)] /
                totals[static_cast<std::size_t>(j2)]);
      }
      best = std::max(best, 0.5 * l1);
    }
  }
  return Clamp01(best);
}

// Histogram TV of a scalar column given conditioning codes.
inline double HistogramFromCodes(const Eigen::VectorXd& sensitive,
                                 const std::vector<int>& condition_codes,
                                 int num_conditions, int bins) {
  const int n = static_cast<int>(sensitive.size());
  const int num_bins = bins > 0 ? bins
                                : static_cast<int>(std::ceil(
                                      std::cbrt(static_cast<double>(n))));
  const double lo = sensitive.minCoeff();
  const double hi = sensitive.maxCoeff();
  if (hi <= lo) return 0.0;  // constant column: identical conditionals
  const double width = (hi - lo) / num_bins;
  std::vector<std::vector<double>> counts(
      static_cast<std::size_t>(num_conditions),
      std::vector<double>(static_cast<std::size_t>(num_bins), 0.0));
  std::vector<double> totals(static_cast<std::size_t>(num_conditions), 0.0);
  for (int r = 0; r < n; ++r) {
    int bin = static_cast<int>((sensitive(r) - lo) / width);
    bin = std::clamp(bin, 0, num_bins - 1);
    counts[static_cast<std::size_t>(condition_codes[static_cast<std::size_t>(
        r)])][static_cast<std::size_t>(bin)] += 1.0;
    totals[static_cast<std::size_t>(
        condition_codes[static_cast<std::size_t>(r)])] += 1.0;
  }
  for (int j = 0; j < num_conditions; ++j) {
    if (totals[static_cast<std::size_t>(j)] <= 0) {
      throw ConditioningUnsupported("conditioning category " +
                                    std::to_string(j) + " has no samples");
    }
  }
  double best = 0.0;
  for (int j1 = 0; j1 < num_conditions; ++j1) {
    for (int j2 = j1 + 1; j2 < num_conditions; ++j2) {
      double l1 = 0.0;
      for (int b = 0; b < num_bins; ++b) {
        l1 += std::abs(
            counts[static_cast<std::size_t>(j1)][static_cast<std::size_t>(b)] /
                totals[static_cast<std::size_t>(j1)] -
            counts[static_cast<std::size_t>(j2)][static_cast<std::size_t>(b)] /
                totals[static_cast<std::size_t>(j2)]);
      }
      best = std::max(best, 0.5 * l1);
    }
  }
  return Clamp01(best);
}

inline int CountDistinct(const Eigen::VectorXd& column, int cap) {
  std::set<double> seen;
  for (int r = 0; r < column.size(); ++r) {
    seen.insert(column(r));
    if (static_cast<int>(seen.size()) > cap) break;
  }
  return static_cast<int>(seen.size());
}

}  // namespace internal

// Plug-in conditional TV for a discrete insensitive feature against the joint
// categories of the (discrete) sensitive block: forms empirical conditional
// PMFs per conditioning value and returns the maximum pairwise half-L1
// distance.  A single observed conditioning value yields 0.
inline double TvDiscretePlugin(const Dataset& d, const FeaturePartition& part,
                               int u_index) {
  d.Validate();
  int num_values = 0;
  const std::vector<int> value_codes =
      internal::CodeColumns(d, part.sensitive, &num_values);
  int num_conditions = 0;
  const std::vector<int> condition_codes =
      internal::CodeColumn(d.features.col(u_index), &num_conditions);
  if (num_conditions < 2) return 0.0;
  return internal::DiscretePluginFromCodes(value_codes, num_values,
                                           condition_codes, num_conditions);
}

// Histogram estimator for a single continuous sensitive feature conditioned
// on a discrete insensitive feature.  The sensitive range is split into
// `bins` equal-width bins (default ceil(n^(1/3)), realizing an n^(-1/3)
// bandwidth).
inline double TvHistogram(const Dataset& d, const FeaturePartition& part,
                          int u_index, int bins = 0) {
  d.Validate();
  if (part.sensitive.size() != 1) {
    throw EstimatorMismatch(
        "histogram estimator requires exactly one continuous sensitive "
        "feature");
  }
  int num_conditions = 0;
  const std::vector<int> condition_codes =
      internal::CodeColumn(d.features.col(u_index), &num_conditions);
  if (num_conditions < 2) return 0.0;
  return internal::HistogramFromCodes(d.features.col(part.sensitive[0]),
                                      condition_codes, num_conditions, bins);
}

struct GaussianRegressionTv {
  double value = 0.0;
  bool degenerate_fit = false;  // zero residual variance; value forced to 1
};

// Least-squares plug-in for one continuous sensitive and one continuous
// insensitive feature: fits slope/intercept/residual variance and evaluates
// the equal-variance Gaussian closed form at the widest observed
// conditioning pair.
inline GaussianRegressionTv TvGaussianRegression(const Dataset& d,
                                                 const FeaturePartition& part,
                                                 int u_index) {
  d.Validate();
  if (part.sensitive.size() != 1) {
    throw EstimatorMismatch(
        "regression estimator requires exactly one sensitive feature");
  }
  const int n = d.n();
  if (n < 3) throw EstimatorError("need at least 3 rows");
  const Eigen::VectorXd u = d.features.col(u_index);
  const Eigen::VectorXd s = d.features.col(part.sensitive[0]);
  const double u_bar = u.mean();
  const double s_bar = s.mean();
  const Eigen::VectorXd uc = u.array() - u_bar;
  const Eigen::VectorXd sc = s.array() - s_bar;
  const double uu = uc.squaredNorm();
  if (uu <= 0) {
    throw EstimatorError("conditioning feature has zero variance");
  }
  const double slope = uc.dot(sc) / uu;
  const Eigen::VectorXd residual = sc - slope * uc;
  const double residual_var = residual.squaredNorm() / n;
  GaussianRegressionTv out;
  // A numerically perfect linear fit leaves only rounding residue relative
  // to the sensitive column's scale.
  if (residual_var <= std::max(1e-15 * sc.squaredNorm() / n, 1e-300)) {
    out.value = 1.0;
    out.degenerate_fit = true;
    return out;
  }
  const double spread = u.maxCoeff() - u.minCoeff();
  out.value = Clamp01(
      2.0 * NormalCdf(std::abs(slope) * spread /
                      (2.0 * std::sqrt(residual_var))) -
      1.0);
  return out;
}

// Conditional TV of the sensitive block of a known Gaussian model, evaluated
// between the two clipped conditioning endpoints
//   x  = mu_u - 2 sqrt(log(2 m_s / delta)),
//   x' = mu_u + 2 sqrt(log(2 m_s / delta)),
// which bound each sensitive coordinate with probability 1 - delta/2.  The
// conditional covariance is shift-invariant, so the two conditionals share a
// covariance and differ only in mean, giving the Mahalanobis closed form.
inline double TvPosteriorGaussian(const GaussianSpec& spec,
                                  const FeaturePartition& part, int u_index,
                                  double delta) {
  if (!(delta > 0 && delta < 1)) {
    throw ParameterError("delta must lie in (0, 1)");
  }
  if (part.IsSensitive(u_index)) {
    throw SpecError("conditioning feature must be insensitive");
  }
  const int m_s = part.num_sensitive();
  if (m_s == 0) return 0.0;
  const double var_u = spec.covariance(u_index, u_index);
  if (!(var_u > 0)) {
    throw SpecError("conditioning feature has non-positive variance");
  }
  Eigen::VectorXd cross(m_s);
  Eigen::MatrixXd block(m_s, m_s);
  for (int a = 0; a < m_s; ++a) {
    cross(a) = spec.covariance(part.sensitive[a], u_index);
    for (int b = 0; b < m_s; ++b) {
      block(a, b) = spec.covariance(part.sensitive[a], part.sensitive[b]);
    }
  }
  const double endpoint_spread =
      4.0 * std::sqrt(std::log(2.0 * m_s / delta));
  const Eigen::VectorXd mean_shift = cross * (endpoint_spread / var_u);
  const Eigen::MatrixXd posterior_cov =
      block - (cross * cross.transpose()) / var_u;
  Eigen::LLT<Eigen::MatrixXd> llt(posterior_cov);
  if (llt.info() != Eigen::Success) {
    throw SpecError("posterior covariance is not positive definite");
  }
  const double mahalanobis_sq = mean_shift.dot(llt.solve(mean_shift));
  return Clamp01(2.0 * NormalCdf(0.5 * std::sqrt(mahalanobis_sq)) - 1.0);
}

// Maximum-likelihood Gaussian moments of a dataset (labels ignored).
inline GaussianSpec FitGaussianMoments(const Dataset& d) {
  d.Validate();
  if (d.n() < 2) throw EstimatorError("need at least 2 rows to fit moments");
  GaussianSpec spec;
  spec.mean = d.features.colwise().mean();
  const Eigen::MatrixXd centered = d.features.rowwise() - spec.mean.transpose();
  spec.covariance = (centered.transpose() * centered) / d.n();
  spec.theta_true = Eigen::VectorXd::Zero(d.m());
  spec.noise_std = 0.0;
  return spec;
}

// Upper-confidence adjustment: value + 2 c2 sqrt(log((m - m_s)/delta)) / n^gamma,
// clamped to [0, 1].  A clamped value of 1 simply reproduces the uniform
// noise scale for that coordinate, so clamping never under-protects.
inline TVProfile ConfidenceAdjust(const TVProfile& profile, double c2,
                                  double gamma, int n, int m, int m_s,
                                  double delta) {
  if (!(gamma > 0 && gamma <= 0.5)) {
    throw ParameterError("gamma must lie in (0, 1/2]");
  }
  if (!(c2 > 0)) throw ParameterError("c2 must be positive");
  if (n < 2) throw ParameterError("n must be at least 2");
  if (m <= m_s) throw ParameterError("need m > m_s");
  if (!(delta > 0 && delta < 1)) {
    throw ParameterError("delta must lie in (0, 1)");
  }
  const double margin = 2.0 * c2 *
                        std::sqrt(std::log((m - m_s) / delta)) /
                        std::pow(static_cast<double>(n), gamma);
  TVProfile out = profile;
  out.kind = TvKind::kConfidenceAdjusted;
  for (auto& [index, value] : out.values) value = Clamp01(value + margin);
  out.meta.c2 = c2;
  out.meta.gamma = gamma;
  out.meta.n = n;
  out.meta.m = m;
  out.meta.m_s = m_s;
  out.meta.delta = delta;
  return out;
}

enum class TvEstimatorKind {
  kAuto,
  kExactPosterior,
  kEmpiricalGaussian,
  kDiscretePlugin,
  kHistogram,
  kGaussianRegression,
};

inline std::string ToString(TvEstimatorKind kind) {
  switch (kind) {
    case TvEstimatorKind::kAuto: return "auto";
    case TvEstimatorKind::kExactPosterior: return "exact_posterior";
    case TvEstimatorKind::kEmpiricalGaussian: return "empirical_gaussian";
    case TvEstimatorKind::kDiscretePlugin: return "discrete_plugin";
    case TvEstimatorKind::kHistogram: return "histogram";
    case TvEstimatorKind::kGaussianRegression: return "gaussian_regression";
  }
  return "unknown";
}

inline TvEstimatorKind TvEstimatorFromString(const std::string& name) {
  if (name == "auto") return TvEstimatorKind::kAuto;
  if (name == "exact" || name == "exact_posterior")
    return TvEstimatorKind::kExactPosterior;
  if (name == "empirical_gaussian") return TvEstimatorKind::kEmpiricalGaussian;
  if (name == "discrete_plugin") return TvEstimatorKind::kDiscretePlugin;
  if (name == "histogram") return TvEstimatorKind::kHistogram;
  if (name == "gaussian_regression")
    return TvEstimatorKind::kGaussianRegression;
  throw ConfigError("unknown TV estimator '" + name + "'");
}

struct TvStrategy {
  TvEstimatorKind default_estimator = TvEstimatorKind::kAuto;
  std::map<int, TvEstimatorKind> overrides;  // by insensitive column index
  const GaussianSpec* known_spec = nullptr;  // required for kExactPosterior
  double delta = 1e-4;                       // endpoint clipping level
  int histogram_bins = 0;                    // 0 -> ceil(n^(1/3))
  const FeatureInfo* feature_info = nullptr; // optional one-hot groups
  int discrete_max_values = 12;  // distinct-value cap for "discrete" in kAuto
};

namespace internal {

// Auto selection for one insensitive feature.  For a mixed sensitive block
// (discrete and continuous columns together) the conditional TV is bounded by
// the clamped sum of the two blocks' TVs; the continuous block is handled
// with per-category Gaussian fits under a pooled covariance.
inline double EstimateAuto(const Dataset& d, const FeaturePartition& part,
                           const std::vector<int>& condition_codes,
                           int num_conditions, const TvStrategy& strategy) {
  if (num_conditions < 2) return 0.0;
  std::vector<int> discrete_sensitive;
  std::vector<int> continuous_sensitive;
  for (int s : part.sensitive) {
    if (CountDistinct(d.features.col(s), strategy.discrete_max_values) <=
        strategy.discrete_max_values) {
      discrete_sensitive.push_back(s);
    } else {
      continuous_sensitive.push_back(s);
    }
  }
  double total = 0.0;
  if (!discrete_sensitive.empty()) {
    int num_values = 0;
    const std::vector<int> value_codes =
        CodeColumns(d, discrete_sensitive, &num_values);
    total += DiscretePluginFromCodes(value_codes, num_values, condition_codes,
                                     num_conditions);
  }
  if (continuous_sensitive.size() == 1) {
    total += HistogramFromCodes(d.features.col(continuous_sensitive[0]),
                                condition_codes, num_conditions,
                                strategy.histogram_bins);
  } else if (continuous_sensitive.size() > 1) {
    // Per-category means under a pooled covariance; Mahalanobis closed form.
    const int k = static_cast<int>(continuous_sensitive.size());
    std::vector<Eigen::VectorXd> sums(
        static_cast<std::size_t>(num_conditions), Eigen::VectorXd::Zero(k));
    std::vector<double> totals(static_cast<std::size_t>(num_conditions), 0.0);
    Eigen::MatrixXd rowsk(d.n(), k);
    for (int c = 0; c < k; ++c) {
      rowsk.col(c) = d.features.col(continuous_sensitive[static_cast<
          std::size_t>(c)]);
    }
    for (int r = 0; r < d.n(); ++r) {
      const int j = condition_codes[static_cast<std::size_t>(r)];
      sums[static_cast<std::size_t>(j)] += rowsk.row(r).transpose();
      totals[static_cast<std::size_t>(j)] += 1.0;
    }
    std::vector<Eigen::VectorXd> means(static_cast<std::size_t>(num_conditions));
    for (int j = 0; j < num_conditions; ++j) {
      if (totals[static_cast<std::size_t>(j)] <= 0) {
        throw ConditioningUnsupported("conditioning category " +
                                      std::to_string(j) + " has no samples");
      }
      means[static_cast<std::size_t>(j)] =
          sums[static_cast<std::size_t>(j)] / totals[static_cast<std::size_t>(j)];
    }
    Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(k, k);
    for (int r = 0; r < d.n(); ++r) {
      const int j = condition_codes[static_cast<std::size_t>(r)];
      const Eigen::VectorXd centered =
          rowsk.row(r).transpose() - means[static_cast<std::size_t>(j)];
      pooled += centered * centered.transpose();
    }
    pooled /= d.n();
    Eigen::LLT<Eigen::MatrixXd> llt(pooled);
    if (llt.info() != Eigen::Success) {
      throw EstimatorError("pooled covariance of the sensitive block is "
                           "singular");
    }
    double best = 0.0;
    for (int j1 = 0; j1 < num_conditions; ++j1) {
      for (int j2 = j1 + 1; j2 < num_conditions; ++j2) {
        const Eigen::VectorXd diff = means[static_cast<std::size_t>(j1)] -
                                     means[static_cast<std::size_t>(j2)];
        const double q = diff.dot(llt.solve(diff));
        best = std::max(best, 2.0 * NormalCdf(0.5 * std::sqrt(q)) - 1.0);
      }
    }
    total += best;
  }
  return Clamp01(total);
}

}  // namespace internal

// One TV value per insensitive feature.  With one-hot group information, all
// columns of a raw categorical feature are estimated once (conditioning on
// the raw category) and share the group's value.
inline TVProfile BuildTvProfile(const Dataset& d, const FeaturePartition& part,
                                const TvStrategy& strategy) {
  d.Validate();
  part.Validate(d.m());
  TVProfile profile;
  profile.kind = TvKind::kExact;
  profile.meta.estimator = ToString(strategy.default_estimator);
  profile.meta.n = d.n();
  profile.meta.m = d.m();
  profile.meta.m_s = part.num_sensitive();
  profile.meta.delta = strategy.delta;

  GaussianSpec fitted;
  bool have_fitted = false;
  auto fitted_spec = [&]() -> const GaussianSpec& {
    if (!have_fitted) {
      fitted = FitGaussianMoments(d);
      have_fitted = true;
    }
    return fitted;
  };

  auto estimator_for = [&](int u) {
    const auto it = strategy.overrides.find(u);
    return it != strategy.overrides.end() ? it->second
                                          : strategy.default_estimator;
  };

  auto estimate_single = [&](int u, TvEstimatorKind kind) -> double {
    switch (kind) {
      case TvEstimatorKind::kExactPosterior:
        if (strategy.known_spec == nullptr) {
          throw ProfileError("exact estimator requires a known Gaussian spec");
        }
        return TvPosteriorGaussian(*strategy.known_spec, part, u,
                                   strategy.delta);
      case TvEstimatorKind::kEmpiricalGaussian:
        profile.kind = TvKind::kEmpirical;
        return TvPosteriorGaussian(fitted_spec(), part, u, strategy.delta);
      case TvEstimatorKind::kDiscretePlugin:
        profile.kind = TvKind::kEmpirical;
        return TvDiscretePlugin(d, part, u);
      case TvEstimatorKind::kHistogram:
        profile.kind = TvKind::kEmpirical;
        return TvHistogram(d, part, u, strategy.histogram_bins);
      case TvEstimatorKind::kGaussianRegression:
        profile.kind = TvKind::kEmpirical;
        return TvGaussianRegression(d, part, u).value;
      case TvEstimatorKind::kAuto: {
        profile.kind = TvKind::kEmpirical;
        const int distinct = internal::CountDistinct(
            d.features.col(u), strategy.discrete_max_values);
        if (distinct <= strategy.discrete_max_values) {
          int num_conditions = 0;
          const std::vector<int> codes =
              internal::CodeColumn(d.features.col(u), &num_conditions);
          return internal::EstimateAuto(d, part, codes, num_conditions,
                                        strategy);
        }
        if (part.sensitive.size() == 1 &&
            internal::CountDistinct(d.features.col(part.sensitive[0]),
                                    strategy.discrete_max_values) >
                strategy.discrete_max_values) {
          return TvGaussianRegression(d, part, u).value;
        }
        return TvPosteriorGaussian(fitted_spec(), part, u, strategy.delta);
      }
    }
    throw ProfileError("unhandled estimator kind");
  };

  std::vector<bool> done(static_cast<std::size_t>(d.m()), false);
  for (int u : part.insensitive) {
    if (done[static_cast<std::size_t>(u)]) continue;
    const TvEstimatorKind kind = estimator_for(u);
    try {
      // Columns of a one-hot group share one estimate conditioned on the
      // decoded raw category.
      const FeatureInfo* info = strategy.feature_info;
      if (info != nullptr && !info->group_of.empty()) {
        const FeatureInfo::Group& group =
            info->groups[static_cast<std::size_t>(
                info->group_of[static_cast<std::size_t>(u)])];
        if (group.categorical && group.columns.size() > 1 &&
            (kind == TvEstimatorKind::kAuto ||
             kind == TvEstimatorKind::kDiscretePlugin ||
             kind == TvEstimatorKind::kHistogram)) {
          int num_conditions = 0;
          const std::vector<int> codes =
              internal::CodeColumns(d, group.columns, &num_conditions);
          double value = 0.0;
          if (kind == TvEstimatorKind::kHistogram) {
            if (part.sensitive.size() != 1) {
              throw EstimatorMismatch(
                  "histogram estimator requires exactly one continuous "
                  "sensitive feature");
            }
            value = internal::HistogramFromCodes(
                d.features.col(part.sensitive[0]), codes, num_conditions,
                strategy.histogram_bins);
          } else if (kind == TvEstimatorKind::kDiscretePlugin) {
            int num_values = 0;
            const std::vector<int> value_codes =
                internal::CodeColumns(d, part.sensitive, &num_values);
            value = num_conditions < 2
                        ? 0.0
                        : internal::DiscretePluginFromCodes(
                              value_codes, num_values, codes, num_conditions);
          } else {
            value = internal::EstimateAuto(d, part, codes, num_conditions,
                                           strategy);
          }
          profile.kind = TvKind::kEmpirical;
          for (int col : group.columns) {
            if (!part.IsSensitive(col)) {
              profile.values[col] = value;
              done[static_cast<std::size_t>(col)] = true;
            }
          }
          continue;
        }
      }
      profile.values[u] = estimate_single(u, kind);
      done[static_cast<std::size_t>(u)] = true;
    } catch (const Error& e) {
      throw ProfileError("feature " + std::to_string(u + 1) + " [" + e.tag() +
                         "]: " + e.what());
    }
  }
  profile.CheckCovers(part);
  return profile;
}

}  // namespace corrdp

#endif  // CORRDP_TV_ESTIMATION_HPP_
