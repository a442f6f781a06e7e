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

#ifndef CORRDP_LOSSES_HPP_
#define CORRDP_LOSSES_HPP_

#include <Eigen/Core>
#include <cmath>
#include <optional>
#include <string>

#include "corrdp/dataset.hpp"
#include "corrdp/errors.hpp"
#include "corrdp/math_util.hpp"

namespace corrdp {

enum class LossKind { kSquaredError, kRidge, kLogistic };

inline std::string ToString(LossKind kind) {
  switch (kind) {
    case LossKind::kSquaredError: return "squared";
    case LossKind::kRidge: return "ridge";
    case LossKind::kLogistic: return "logistic";
  }
  return "unknown";
}

inline LossKind LossKindFromString(const std::string& name) {
  if (name == "squared") return LossKind::kSquaredError;
  if (name == "ridge") return LossKind::kRidge;
  if (name == "logistic") return LossKind::kLogistic;
  throw ConfigError("unknown loss '" + name + "'");
}

// Generalized-linear-model loss.  The ridge term lives at the objective
// level, (ridge_lambda / n) ||theta||^2, so per-sample gradient sensitivity
// is unchanged by regularization.
struct LossSpec {
  LossKind kind = LossKind::kSquaredError;
  double param_bound = 1.0;   // decision-domain radius D
  double lipschitz = 0.0;     // 0 -> derive via DeriveLipschitz
  double ridge_lambda = 1.0;  // only for kRidge
  std::optional<double> clip; // per-sample gradient-norm cap

  bool IsSquaredFamily() const { return kind != LossKind::kLogistic; }

  // Squared family: 2 B (D + max|y|).  Logistic: 2 B.  Both are safe upper
  // bounds for per-sample gradient norms on the bounded domain and can be
  // overridden by setting `lipschitz` directly.
  double DeriveLipschitz(double feature_norm_bound, double max_abs_label) const {
    if (lipschitz > 0) return lipschitz;
    if (IsSquaredFamily()) {
      return 2.0 * feature_norm_bound * (param_bound + max_abs_label);
    }
    return 2.0 * feature_norm_bound;
  }
};

// Per-sample loss value.  For the ridge kind this is the plain squared error;
// the regularizer is added by Objective().
inline double LossValue(const LossSpec& spec, const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& x, double y) {
  if (theta.size() != x.size()) {
    throw ShapeError("theta and x dimensions differ");
  }
  const double margin = theta.dot(x);
  switch (spec.kind) {
    case LossKind::kSquaredError:
    case LossKind::kRidge: {
      const double r = margin - y;
      return r * r;
    }
    case LossKind::kLogistic: {
      if (y != 0.0 && y != 1.0) {
        throw ParameterError("logistic loss requires labels in {0, 1}");
      }
      // log(1 + e^t) - y t, evaluated stably.
      const double softplus =
          margin > 0 ? margin + std::log1p(std::exp(-margin))
                     : std::log1p(std::exp(margin));
      return softplus - y * margin;
    }
  }
  throw ParameterError("unhandled loss kind");
}

// Analytic per-sample gradient, rescaled to norm <= clip when set.
inline Eigen::VectorXd LossGradient(const LossSpec& spec,
                                    const Eigen::VectorXd& theta,
                                    const Eigen::VectorXd& x, double y) {
  if (theta.size() != x.size()) {
    throw ShapeError("theta and x dimensions differ");
  }
  const double margin = theta.dot(x);
  Eigen::VectorXd grad;
  switch (spec.kind) {
    case LossKind::kSquaredError:
    case LossKind::kRidge:
      grad = 2.0 * (margin - y) * x;
      break;
    case LossKind::kLogistic:
      if (y != 0.0 && y != 1.0) {
        throw ParameterError("logistic loss requires labels in {0, 1}");
      }
      grad = (Sigmoid(margin) - y) * x;
      break;
  }
  if (spec.clip.has_value()) {
    const double norm = grad.norm();
    if (norm > *spec.clip && norm > 0) grad *= (*spec.clip / norm);
  }
  return grad;
}

// Mean empirical loss plus the objective-level ridge term.
inline double Objective(const LossSpec& spec, const Dataset& d,
                        const Eigen::VectorXd& theta) {
  if (theta.size() != d.m()) throw ShapeError("theta dimension mismatch");
  const Eigen::VectorXd margins = d.features * theta;
  double value = 0;
  if (spec.kind == LossKind::kLogistic) {
    for (int r = 0; r < d.n(); ++r) {
      const double y = d.labels(r);
      if (y != 0.0 && y != 1.0) {
        throw ParameterError("logistic loss requires labels in {0, 1}");
      }
      const double t = margins(r);
      const double softplus =
          t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
      value += softplus - y * t;
    }
    value /= d.n();
  } else {
    value = (margins - d.labels).squaredNorm() / d.n();
    if (spec.kind == LossKind::kRidge) {
      value += spec.ridge_lambda / d.n() * theta.squaredNorm();
    }
  }
  return value;
}

// Full-dataset objective gradient, unclipped (per-sample clipping is a
// training-time device; mini-batch gradients are assembled by the optimizer
// from LossGradient).
inline Eigen::VectorXd ObjectiveGradient(const LossSpec& spec,
                                         const Dataset& d,
                                         const Eigen::VectorXd& theta) {
  if (theta.size() != d.m()) throw ShapeError("theta dimension mismatch");
  Eigen::VectorXd margins = d.features * theta;
  Eigen::VectorXd grad;
  if (spec.kind == LossKind::kLogistic) {
    for (int r = 0; r < d.n(); ++r) {
      margins(r) = Sigmoid(margins(r)) - d.labels(r);
    }
    grad = d.features.transpose() * margins / d.n();
  } else {
    margins -= d.labels;
    grad = 2.0 * (d.features.transpose() * margins) / d.n();
    if (spec.kind == LossKind::kRidge) {
      grad += 2.0 * spec.ridge_lambda / d.n() * theta;
    }
  }
  return grad;
}

// Coefficients of the per-coordinate gradient-smoothness bound
//   |grad_i l(theta; x1, y) - grad_i l(theta; x2, y)|
//     <= direct * L * |x1_i - x2_i| + cross * (L/m) * sum_{j != i} |x1_j - x2_j|,
// valid on the bounded domain where B |theta_i| <= boundary_c * D / m.
struct GlmSmoothness {
  double direct = 0;
  double cross = 0;
};

inline GlmSmoothness SmoothnessConstants(
    const LossSpec& spec, double feature_norm_bound, double param_bound,
    int m, double boundary_c = 1.0,
    const Eigen::VectorXd* theta_check = nullptr) {
  if (m < 1) throw ParameterError("feature count must be positive");
  if (!(feature_norm_bound > 0) || !(param_bound > 0) || !(boundary_c > 0)) {
    throw ParameterError("bounds must be positive");
  }
  if (theta_check != nullptr) {
    const double cap = boundary_c * param_bound / m;
    for (int i = 0; i < theta_check->size(); ++i) {
      if (feature_norm_bound * std::abs((*theta_check)(i)) > cap + 1e-12) {
        throw AssumptionError(
            "coordinate " + std::to_string(i + 1) +
            " violates the boundary condition B|theta_i| <= C D / m");
      }
    }
  }
  GlmSmoothness out;
  const double cd = boundary_c * param_bound;
  if (spec.IsSquaredFamily()) {
    out.direct = 4.0 * feature_norm_bound + 2.0 * cd / m;
    out.cross = 2.0 * cd;
  } else {
    out.direct = 2.0 + cd / (4.0 * m);
    out.cross = cd / 4.0;
  }
  return out;
}

// Training-set classification accuracy for the logistic model.
inline double ClassificationAccuracy(const Dataset& d,
                                     const Eigen::VectorXd& theta) {
  int correct = 0;
  for (int r = 0; r < d.n(); ++r) {
    const double p = Sigmoid(d.features.row(r).dot(theta));
    const double predicted = p >= 0.5 ? 1.0 : 0.0;
    if (predicted == d.labels(r)) ++correct;
  }
  return static_cast<double>(correct) / d.n();
}

}  // namespace corrdp

#endif  // CORRDP_LOSSES_HPP_
