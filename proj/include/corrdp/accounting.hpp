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

#ifndef CORRDP_ACCOUNTING_HPP_
#define CORRDP_ACCOUNTING_HPP_

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "corrdp/dataset.hpp"
#include "corrdp/errors.hpp"
#include "corrdp/optimizer.hpp"
#include "corrdp/tv_estimation.hpp"

namespace corrdp {

// Renyi divergence of order `alpha` between Gaussians with diagonal
// covariances.  The order-1 branch is the KL divergence; for other orders the
// mixed covariance (1 - alpha) var1 + alpha var2 must stay positive on every
// coordinate.
inline double RenyiGaussian(const Eigen::VectorXd& mean1,
                            const Eigen::VectorXd& var1,
                            const Eigen::VectorXd& mean2,
                            const Eigen::VectorXd& var2, double alpha) {
  const int m = static_cast<int>(mean1.size());
  if (mean2.size() != m || var1.size() != m || var2.size() != m) {
    throw ShapeError("mean/variance vectors disagree in dimension");
  }
  if (!(alpha > 0)) throw ParameterError("alpha must be positive");
  for (int i = 0; i < m; ++i) {
    if (!(var1(i) > 0) || !(var2(i) > 0)) {
      throw ParameterError("variances must be positive");
    }
  }
  if (std::abs(alpha - 1.0) < 1e-12) {
    double kl = 0;
    for (int i = 0; i < m; ++i) {
      const double dm = mean2(i) - mean1(i);
      kl += std::log(var2(i) / var1(i)) + var1(i) / var2(i) +
            dm * dm / var2(i) - 1.0;
    }
    return 0.5 * kl;
  }
  double logdet = 0;
  double quad = 0;
  for (int i = 0; i < m; ++i) {
    const double mixed = (1.0 - alpha) * var1(i) + alpha * var2(i);
    if (!(mixed > 0)) {
      throw DivergenceUndefined(
          "mixed covariance not positive at coordinate " +
          std::to_string(i + 1));
    }
    logdet += alpha * std::log(var2(i)) + (1.0 - alpha) * std::log(var1(i)) -
              std::log(mixed);
    const double dm = mean1(i) - mean2(i);
    quad += dm * dm / mixed;
  }
  return logdet / (2.0 * (alpha - 1.0)) + 0.5 * alpha * quad;
}

// Worst-case neighboring-database scenario for one training step: which
// feature block changes, the distance d(D, D') it implies, and the resulting
// per-coordinate gradient mean shift
//   |shift_i| = (1/n) (c_direct L B_i 1{i changes}
//                      + c_cross (L/m) sum_{j != i, j changes} B_j),
// with per-coordinate norm bounds B_i = B / sqrt(m).
struct NeighborScenario {
  enum class Kind { kSensitiveChange, kInsensitiveChange };
  Kind kind = Kind::kSensitiveChange;
  int changed_feature = -1;  // insensitive change only
  double distance = 1.0;
  Eigen::VectorXd mean_shift;

  // A change confined to the sensitive block; distance 1.
  static NeighborScenario SensitiveChange(const FeaturePartition& part, int m,
                                          double lipschitz, double norm_bound,
                                          int n, double c_direct,
                                          double c_cross) {
    NeighborScenario s;
    s.kind = Kind::kSensitiveChange;
    s.distance = 1.0;
    s.mean_shift = Eigen::VectorXd::Zero(m);
    const double per_coord = norm_bound / std::sqrt(static_cast<double>(m));
    const double m_s = part.num_sensitive();
    for (int i = 0; i < m; ++i) {
      const bool sensitive = part.IsSensitive(i);
      const double direct = sensitive ? c_direct * per_coord : 0.0;
      const double cross =
          c_cross / m * per_coord * (sensitive ? m_s - 1 : m_s);
      s.mean_shift(i) = lipschitz / n * (direct + cross);
    }
    return s;
  }

  // A change in one insensitive feature; distance max{TV(u), floor}.  The
  // floor keeps the distance positive for exactly-independent features (a
  // positive floor only tightens the certified statement).
  static NeighborScenario InsensitiveChange(const FeaturePartition& part,
                                            int m, int u, double tv_value,
                                            double lipschitz,
                                            double norm_bound, int n,
                                            double c_direct, double c_cross,
                                            double distance_floor = 1e-6) {
    if (part.IsSensitive(u)) {
      throw ParameterError("changed feature must be insensitive");
    }
    NeighborScenario s;
    s.kind = Kind::kInsensitiveChange;
    s.changed_feature = u;
    s.distance = std::max(Clamp01(tv_value), distance_floor);
    s.mean_shift = Eigen::VectorXd::Zero(m);
    const double per_coord = norm_bound / std::sqrt(static_cast<double>(m));
    for (int i = 0; i < m; ++i) {
      s.mean_shift(i) = lipschitz / n *
                        (i == u ? c_direct * per_coord
                                : c_cross / m * per_coord);
    }
    return s;
  }
};

struct CertificateResult {
  bool certified = false;
  double lambda_used = 0;
  // Dimensionless slack: min over the per-step and tail constraints of
  // (bound - value) / bound at the best moment order; negative when refused.
  double margin = -1;
  std::string reason;
};

// Independent verification of a noise profile against one neighbor scenario,
// replaying the moment-accountant chain: the per-step moment
//   a(lambda) = lambda (lambda + 1) / 2 * sum_i (shift_i / sigma_i)^2
// must satisfy a(lambda) <= lambda eps / (2 T d) for some moment order, and
// the composed tail bound delta >= exp(T a(lambda) - lambda eps / d) must
// hold at that order.  Orders are searched over the analysis' choice
// 2 log(1/delta)/eps and an integer grid up to ceil(4 log(1/delta)/eps).
// A certified verdict implies the privacy guarantee; a refusal means not
// certifiable by this sufficient condition.
inline CertificateResult MomentBoundCheck(const NoiseProfile& profile,
                                          const NeighborScenario& scenario,
                                          int iterations, double epsilon,
                                          double delta) {
  if (!(epsilon > 0) || !(delta > 0 && delta < 1)) {
    throw ParameterError("need epsilon > 0 and delta in (0, 1)");
  }
  if (iterations < 1) throw ParameterError("iterations must be positive");
  if (profile.sigma_sq.size() != scenario.mean_shift.size()) {
    throw ShapeError("profile and scenario dimensions differ");
  }
  CertificateResult result;
  double shift_over_sigma_sq = 0;
  for (int i = 0; i < profile.sigma_sq.size(); ++i) {
    const double shift = scenario.mean_shift(i);
    if (shift == 0) continue;
    if (profile.sigma_sq(i) <= 0) {
      result.certified = false;
      result.margin = -std::numeric_limits<double>::infinity();
      result.reason = "unnoised coordinate " + std::to_string(i + 1) +
                      " carries a nonzero mean shift (infinite divergence)";
      return result;
    }
    shift_over_sigma_sq += shift * shift / profile.sigma_sq(i);
  }
  const double d = scenario.distance;
  const double log_inv_delta = std::log(1.0 / delta);

  std::vector<double> lambdas;
  lambdas.push_back(2.0 * log_inv_delta / epsilon);
  const int grid_top = static_cast<int>(
      std::ceil(4.0 * log_inv_delta / epsilon));
  for (int k = 1; k <= grid_top; ++k) lambdas.push_back(k);

  double best_margin = -std::numeric_limits<double>::infinity();
  double best_lambda = lambdas.front();
  for (double lambda : lambdas) {
    const double step_moment =
        0.5 * lambda * (lambda + 1.0) * shift_over_sigma_sq;
    const double step_budget = lambda * epsilon / (2.0 * iterations * d);
    const double tail_budget = lambda * epsilon / d;
    const double tail_value = iterations * step_moment + log_inv_delta;
    const double step_slack =
        step_budget > 0 ? (step_budget - step_moment) / step_budget : -1.0;
    const double tail_slack = (tail_budget - tail_value) / tail_budget;
    const double margin = std::min(step_slack, tail_slack);
    if (margin > best_margin) {
      best_margin = margin;
      best_lambda = lambda;
    }
  }
  result.margin = best_margin;
  result.lambda_used = best_lambda;
  result.certified = best_margin >= 0;
  if (!result.certified) {
    result.reason = "no moment order satisfies both the per-step and tail "
                    "bounds";
  }
  return result;
}

// Privacy amplification by Poisson subsampling at rate zeta.
inline std::pair<double, double> AmplifySubsampling(double epsilon,
                                                    double delta,
                                                    double zeta) {
  if (!(zeta > 0 && zeta <= 1)) {
    throw ParameterError("sampling fraction must lie in (0, 1]");
  }
  return {zeta * epsilon, zeta * delta};
}

// Basic composition: budgets add coordinate-wise.
inline std::pair<double, double> Compose(
    const std::vector<std::pair<double, double>>& budgets) {
  double eps = 0;
  double delta = 0;
  for (const auto& [e, d] : budgets) {
    if (e < 0 || d < 0) throw ParameterError("budgets must be nonnegative");
    eps += e;
    delta += d;
  }
  return {eps, delta};
}

}  // namespace corrdp

#endif  // CORRDP_ACCOUNTING_HPP_
