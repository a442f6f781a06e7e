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

#include "corrdp/losses.hpp"

#include <cmath>

#include "corrdp/random.hpp"
#include "gtest/gtest.h"

namespace corrdp {
namespace {

Eigen::VectorXd Vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<int>(values.size()));
  int i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

TEST(LossValue, WorkedValues) {
  LossSpec squared;
  squared.kind = LossKind::kSquaredError;
  EXPECT_DOUBLE_EQ(LossValue(squared, Vec({0, 0}), Vec({1, 2}), 0.0), 0.0);
  EXPECT_DOUBLE_EQ(LossValue(squared, Vec({1, 1}), Vec({1, 2}), 2.0), 1.0);

  LossSpec logistic;
  logistic.kind = LossKind::kLogistic;
  EXPECT_DOUBLE_EQ(LossValue(logistic, Vec({0, 0}), Vec({3, -1}), 1.0),
                   std::log(2.0));
  EXPECT_THROW(LossValue(logistic, Vec({0, 0}), Vec({1, 1}), 0.5),
               ParameterError);
  EXPECT_THROW(LossValue(squared, Vec({0.0}), Vec({1, 1}), 0.0), ShapeError);
}

TEST(LossGradient, LogisticAtZeroParameter) {
  LossSpec logistic;
  logistic.kind = LossKind::kLogistic;
  const Eigen::VectorXd x = Vec({2.0, -1.0, 0.5});
  const Eigen::VectorXd grad0 =
      LossGradient(logistic, Eigen::VectorXd::Zero(3), x, 0.0);
  const Eigen::VectorXd grad1 =
      LossGradient(logistic, Eigen::VectorXd::Zero(3), x, 1.0);
  EXPECT_LE((grad0 - 0.5 * x).norm(), 1e-15);
  EXPECT_LE((grad1 + 0.5 * x).norm(), 1e-15);
}

TEST(LossGradient, ClipRescalesToExactThreshold) {
  LossSpec squared;
  squared.kind = LossKind::kSquaredError;
  squared.clip = 1.0;
  // Unclipped gradient 2(t.x - y)x has norm 10 here.
  const Eigen::VectorXd grad =
      LossGradient(squared, Vec({0.0}), Vec({1.0}), -5.0);
  EXPECT_DOUBLE_EQ(grad.norm(), 1.0);
}

TEST(LossGradient, MatchesCentralFiniteDifferences) {
  RandomState rng(13, "fd");
  for (LossKind kind : {LossKind::kSquaredError, LossKind::kLogistic}) {
    LossSpec spec;
    spec.kind = kind;
    for (int trial = 0; trial < 100; ++trial) {
      const int m = 3 + static_cast<int>(rng.UniformInt(4));
      Eigen::VectorXd theta(m), x(m);
      for (int j = 0; j < m; ++j) {
        theta(j) = rng.Normal() * 0.5;
        x(j) = rng.Normal() * 0.5;
      }
      const double y =
          kind == LossKind::kLogistic ? (rng.Uniform() < 0.5 ? 0.0 : 1.0)
                                      : rng.Normal();
      const Eigen::VectorXd grad = LossGradient(spec, theta, x, y);
      const double scale = std::max(1.0, grad.norm());
      for (int j = 0; j < m; ++j) {
        const double step = 1e-5;
        Eigen::VectorXd up = theta, down = theta;
        up(j) += step;
        down(j) -= step;
        const double fd =
            (LossValue(spec, up, x, y) - LossValue(spec, down, x, y)) /
            (2.0 * step);
        EXPECT_NEAR(grad(j) / scale, fd / scale, 1e-6);
      }
    }
  }
}

TEST(Objective, RidgeTermLivesAtTheDatasetLevel) {
  LossSpec ridge;
  ridge.kind = LossKind::kRidge;
  ridge.ridge_lambda = 1.0;
  Dataset d;
  d.features.resize(2, 2);
  d.features << 1, 0, 0, 1;
  d.labels = Vec({1.0, -1.0});
  const Eigen::VectorXd theta = Vec({2.0, 2.0});
  // Mean squared error (1 + 9)/2 plus (1/n)||theta||^2 = 8/2.
  EXPECT_DOUBLE_EQ(Objective(ridge, d, theta), 5.0 + 4.0);
  // Per-sample values exclude the regularizer.
  EXPECT_DOUBLE_EQ(LossValue(ridge, theta, Vec({1.0, 0.0}), 1.0), 1.0);
}

TEST(Objective, GradientMatchesFiniteDifferencesOnTheObjective) {
  RandomState rng(14, "obj-fd");
  Dataset d;
  const int n = 20, m = 4;
  d.features.resize(n, m);
  d.labels.resize(n);
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < m; ++j) d.features(r, j) = rng.Normal();
    d.labels(r) = rng.Uniform() < 0.5 ? 0.0 : 1.0;
  }
  for (LossKind kind :
       {LossKind::kSquaredError, LossKind::kRidge, LossKind::kLogistic}) {
    LossSpec spec;
    spec.kind = kind;
    spec.ridge_lambda = 0.7;
    Eigen::VectorXd theta(m);
    for (int j = 0; j < m; ++j) theta(j) = 0.3 * rng.Normal();
    const Eigen::VectorXd grad = ObjectiveGradient(spec, d, theta);
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd up = theta, down = theta;
      up(j) += 1e-6;
      down(j) -= 1e-6;
      const double fd =
          (Objective(spec, d, up) - Objective(spec, d, down)) / 2e-6;
      EXPECT_NEAR(grad(j), fd, 1e-5);
    }
  }
}

TEST(LossValue, ConvexMidpointInequality) {
  RandomState rng(15, "convex");
  for (LossKind kind : {LossKind::kSquaredError, LossKind::kLogistic}) {
    LossSpec spec;
    spec.kind = kind;
    for (int trial = 0; trial < 300; ++trial) {
      const int m = 3;
      Eigen::VectorXd a(m), b(m), x(m);
      for (int j = 0; j < m; ++j) {
        a(j) = rng.Normal();
        b(j) = rng.Normal();
        x(j) = rng.Normal();
      }
      const double y =
          kind == LossKind::kLogistic ? (rng.Uniform() < 0.5 ? 0.0 : 1.0)
                                      : rng.Normal();
      const Eigen::VectorXd mid = 0.5 * (a + b);
      EXPECT_LE(LossValue(spec, mid, x, y),
                0.5 * LossValue(spec, a, x, y) +
                    0.5 * LossValue(spec, b, x, y) + 1e-9);
    }
  }
}

TEST(SmoothnessConstants, WorkedValues) {
  LossSpec squared;
  squared.kind = LossKind::kSquaredError;
  const GlmSmoothness sq = SmoothnessConstants(squared, 1.0, 1.0, 100, 1.0);
  EXPECT_DOUBLE_EQ(sq.direct, 4.02);
  EXPECT_DOUBLE_EQ(sq.cross, 2.0);

  LossSpec logistic;
  logistic.kind = LossKind::kLogistic;
  const GlmSmoothness lg = SmoothnessConstants(logistic, 1.0, 1.0, 100, 1.0);
  EXPECT_DOUBLE_EQ(lg.direct, 2.0025);
  EXPECT_DOUBLE_EQ(lg.cross, 0.25);
}

TEST(SmoothnessConstants, LargeDimensionLimits) {
  LossSpec squared;
  squared.kind = LossKind::kSquaredError;
  EXPECT_NEAR(SmoothnessConstants(squared, 1.0, 1.0, 1000000000).direct, 4.0,
              1e-8);
  LossSpec logistic;
  logistic.kind = LossKind::kLogistic;
  EXPECT_NEAR(SmoothnessConstants(logistic, 1.0, 1.0, 1000000000).direct, 2.0,
              1e-8);
}

TEST(SmoothnessConstants, BoundaryConditionIsChecked) {
  LossSpec squared;
  squared.kind = LossKind::kSquaredError;
  Eigen::VectorXd ok = Eigen::VectorXd::Constant(10, 0.05);
  EXPECT_NO_THROW(SmoothnessConstants(squared, 1.0, 1.0, 10, 1.0, &ok));
  Eigen::VectorXd bad = ok;
  bad(3) = 0.5;  // exceeds C D / m = 0.1
  EXPECT_THROW(SmoothnessConstants(squared, 1.0, 1.0, 10, 1.0, &bad),
               AssumptionError);
}

// The per-coordinate gradient-difference bound with the derived constants,
// on random tuples drawn from the bounded domain.
TEST(SmoothnessConstants, CoordinateBoundHoldsEmpirically) {
  RandomState rng(16, "smooth");
  const int m = 8;
  const double feature_bound = 1.0;
  const double param_bound = 1.0;
  const double boundary_c = 1.0;
  const double max_label = 1.0;
  for (LossKind kind : {LossKind::kSquaredError, LossKind::kLogistic}) {
    LossSpec spec;
    spec.kind = kind;
    const GlmSmoothness constants =
        SmoothnessConstants(spec, feature_bound, param_bound, m, boundary_c);
    const double lipschitz =
        spec.DeriveLipschitz(feature_bound, max_label);
    for (int trial = 0; trial < 500; ++trial) {
      Eigen::VectorXd theta(m), x1(m), x2(m);
      for (int j = 0; j < m; ++j) {
        theta(j) = (2.0 * rng.Uniform() - 1.0) * boundary_c * param_bound / m /
                   feature_bound;
        x1(j) = rng.Normal();
        x2(j) = rng.Normal();
      }
      x1 *= feature_bound / std::max(1.0, x1.norm());
      x2 *= feature_bound / std::max(1.0, x2.norm());
      const double y = kind == LossKind::kLogistic
                           ? (rng.Uniform() < 0.5 ? 0.0 : 1.0)
                           : (2.0 * rng.Uniform() - 1.0) * max_label;
      const Eigen::VectorXd g1 = LossGradient(spec, theta, x1, y);
      const Eigen::VectorXd g2 = LossGradient(spec, theta, x2, y);
      for (int i = 0; i < m; ++i) {
        double cross_sum = 0;
        for (int j = 0; j < m; ++j) {
          if (j != i) cross_sum += std::abs(x1(j) - x2(j));
        }
        const double bound =
            constants.direct * lipschitz * std::abs(x1(i) - x2(i)) +
            constants.cross * lipschitz / m * cross_sum;
        EXPECT_LE(std::abs(g1(i) - g2(i)), bound + 1e-9)
            << ToString(kind) << " trial " << trial << " coord " << i;
      }
    }
  }
}

// Per-sample gradient norms stay below the derived constant once clipped at
// it (and for logistic even without clipping).
TEST(LossSpec, ClippingEnforcesTheLipschitzBound) {
  RandomState rng(17, "clip-pro");
  const double feature_bound = 2.0;
  const double max_label = 3.0;
  for (LossKind kind : {LossKind::kSquaredError, LossKind::kLogistic}) {
    LossSpec spec;
    spec.kind = kind;
    spec.param_bound = 1.5;
    const double lipschitz = spec.DeriveLipschitz(feature_bound, max_label);
    spec.clip = lipschitz;
    for (int trial = 0; trial < 300; ++trial) {
      const int m = 5;
      Eigen::VectorXd theta(m), x(m);
      for (int j = 0; j < m; ++j) {
        theta(j) = rng.Normal();
        x(j) = rng.Normal();
      }
      theta *= spec.param_bound / std::max(1.0, theta.norm());
      x *= feature_bound / std::max(1.0, x.norm());
      const double y = kind == LossKind::kLogistic
                           ? (rng.Uniform() < 0.5 ? 0.0 : 1.0)
                           : (2.0 * rng.Uniform() - 1.0) * max_label;
      EXPECT_LE(LossGradient(spec, theta, x, y).norm(), lipschitz + 1e-12);
    }
  }
}

TEST(ClassificationAccuracy, CountsThresholdedPredictions) {
  Dataset d;
  d.features.resize(4, 1);
  d.features << 2.0, -2.0, 3.0, -1.0;
  d.labels = Vec({1.0, 0.0, 0.0, 1.0});
  EXPECT_DOUBLE_EQ(ClassificationAccuracy(d, Vec({1.0})), 0.5);
}

}  // namespace
}  // namespace corrdp
