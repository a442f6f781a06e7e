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

#include "corrdp/optimizer.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "gtest/gtest.h"

namespace corrdp {
namespace {

TEST(CalibrateNoise, FloorActivatesBelowTheBlockRatio) {
  FeaturePartition part = FeaturePartition::LeadingSensitive(100, 10);
  TVProfile tv = TVProfile::Uniform(part, 0.005);
  const NoiseProfile profile = CalibrateNoise(
      Method::kCorrDp, part, &tv, 1.0, 1e-4, 1.0, 100, 1000, 100, 1.0, true);
  const double base = profile.sigma_sq(0);
  for (int u : part.insensitive) {
    EXPECT_DOUBLE_EQ(profile.sigma_sq(u), base * 0.01);  // floor (10/100)^2
  }
}

TEST(CalibrateNoise, FullCorrelationMatchesUniformNoise) {
  FeaturePartition part = FeaturePartition::LeadingSensitive(20, 5);
  TVProfile tv = TVProfile::Uniform(part, 1.0);
  const NoiseProfile corr = CalibrateNoise(Method::kCorrDp, part, &tv, 0.7,
                                           1e-4, 2.0, 50, 300, 20, 3.0, true);
  const NoiseProfile standard = CalibrateNoise(
      Method::kStandard, part, &tv, 0.7, 1e-4, 2.0, 50, 300, 20, 3.0, true);
  EXPECT_EQ((corr.sigma_sq - standard.sigma_sq).cwiseAbs().maxCoeff(), 0.0);
}

TEST(CalibrateNoise, WorkedVarianceRatio) {
  FeaturePartition part = FeaturePartition::LeadingSensitive(100, 10);
  TVProfile tv = TVProfile::Uniform(part, 1.0 / 36.0);
  const NoiseProfile corr = CalibrateNoise(Method::kCorrDp, part, &tv, 0.5,
                                           1e-4, 1.0, 4000, 2000, 100, 1.0, true);
  const NoiseProfile standard = CalibrateNoise(
      Method::kStandard, part, &tv, 0.5, 1e-4, 1.0, 4000, 2000, 100, 1.0, true);
  EXPECT_NEAR(corr.TotalVariance() / standard.TotalVariance(), 0.125, 1e-12);
}

TEST(CalibrateNoise, MethodShapes) {
  FeaturePartition part = FeaturePartition::LeadingSensitive(6, 2);
  TVProfile tv = TVProfile::Uniform(part, 0.4);
  const NoiseProfile semi =
      CalibrateNoise(Method::kSemi, part, &tv, 1.0, 1e-4, 1.0, 10, 100, 6, 1.0, true);
  for (int s : part.sensitive) EXPECT_GT(semi.sigma_sq(s), 0.0);
  for (int u : part.insensitive) EXPECT_DOUBLE_EQ(semi.sigma_sq(u), 0.0);
  const NoiseProfile none = CalibrateNoise(Method::kNonPrivate, part, &tv, 1.0,
                                           1e-4, 1.0, 10, 100, 6, 1.0, true);
  EXPECT_DOUBLE_EQ(none.TotalVariance(), 0.0);
  const NoiseProfile partial = CalibrateNoise(Method::kPartial, part, &tv, 1.0,
                                              1e-4, 1.0, 10, 100, 6, 1.0, true);
  EXPECT_DOUBLE_EQ(partial.TotalVariance(), 0.0);
}

TEST(CalibrateNoise, CoordinateDominanceInvariant) {
  RandomState rng(25, "noise-dom");
  FeaturePartition part = FeaturePartition::LeadingSensitive(12, 4);
  for (int trial = 0; trial < 50; ++trial) {
    TVProfile tv;
    for (int u : part.insensitive) tv.values[u] = rng.Uniform();
    const NoiseProfile corr = CalibrateNoise(Method::kCorrDp, part, &tv, 0.3,
                                             1e-5, 1.5, 100, 500, 12, 1.0, true);
    const NoiseProfile standard = CalibrateNoise(
        Method::kStandard, part, &tv, 0.3, 1e-5, 1.5, 100, 500, 12, 1.0, true);
    for (int i = 0; i < 12; ++i) {
      EXPECT_LE(corr.sigma_sq(i), standard.sigma_sq(i) + 1e-18);
    }
    const double base = corr.sigma_sq(0);
    for (int s : part.sensitive) EXPECT_DOUBLE_EQ(corr.sigma_sq(s), base);
    for (int u : part.insensitive) EXPECT_LE(corr.sigma_sq(u), base);
  }
}

TEST(CalibrateNoise, EmptySensitiveBlockDegenerates) {
  FeaturePartition part;
  part.insensitive = {0, 1, 2};
  TVProfile tv = TVProfile::Uniform(part, 0.0);
  const NoiseProfile profile =
      CalibrateNoise(Method::kCorrDp, part, &tv, 1.0, 1e-4, 1.0, 10, 100, 3, 1.0, true);
  EXPECT_TRUE(profile.degenerate_floor);
  EXPECT_DOUBLE_EQ(profile.TotalVariance(), 0.0);
}

Dataset SmallQuadratic(int n, int m, std::uint64_t seed) {
  RandomState rng(seed, "opt-data");
  Dataset d;
  d.features.resize(n, m);
  d.labels.resize(n);
  Eigen::VectorXd truth(m);
  for (int j = 0; j < m; ++j) truth(j) = rng.Normal();
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < m; ++j) d.features(r, j) = rng.Normal();
    d.labels(r) = d.features.row(r).dot(truth) + 0.1 * rng.Normal();
  }
  return d;
}

NoiseProfile ZeroNoise(Method method, int m, double lipschitz = 1.0) {
  NoiseProfile profile;
  profile.method = method;
  profile.sigma_sq = Eigen::VectorXd::Zero(m);
  profile.lipschitz = lipschitz;
  return profile;
}

TEST(CorrDpSgd, NoiselessFullBatchReachesTheLeastSquaresSolution) {
  const Dataset d = SmallQuadratic(60, 3, 31);
  LossSpec loss;
  loss.kind = LossKind::kSquaredError;
  TrainConfig cfg;
  cfg.iterations = 10000;
  cfg.step_size = 0.05;
  cfg.method = Method::kNonPrivate;
  RandomState rng(1, "sgd");
  const FitResult fit =
      CorrDpSgd(d, FeaturePartition::LeadingSensitive(3, 1), loss, cfg,
                ZeroNoise(Method::kNonPrivate, 3), rng);
  const Eigen::VectorXd normal_equations =
      (d.features.transpose() * d.features)
          .ldlt()
          .solve(d.features.transpose() * d.labels);
  EXPECT_LE((fit.theta - normal_equations).norm(), 1e-4);
}

TEST(CorrDpSgd, FullCorrelationAndUniformNoiseShareTrajectories) {
  const Dataset d = SmallQuadratic(40, 4, 32);
  const FeaturePartition part = FeaturePartition::LeadingSensitive(4, 2);
  TVProfile tv = TVProfile::Uniform(part, 1.0);
  LossSpec loss;
  loss.kind = LossKind::kSquaredError;
  TrainConfig cfg;
  cfg.iterations = 200;
  cfg.step_size = 0.01;

  cfg.method = Method::kCorrDp;
  const NoiseProfile corr = CalibrateNoise(Method::kCorrDp, part, &tv, 1.0,
                                           1e-4, 1.0, 200, 40, 4, 1.0, true);
  RandomState rng1(7, "pair");
  const FitResult a = CorrDpSgd(d, part, loss, cfg, corr, rng1);

  cfg.method = Method::kStandard;
  const NoiseProfile standard = CalibrateNoise(
      Method::kStandard, part, &tv, 1.0, 1e-4, 1.0, 200, 40, 4, 1.0, true);
  RandomState rng2(7, "pair");
  const FitResult b = CorrDpSgd(d, part, loss, cfg, standard, rng2);

  EXPECT_EQ((a.theta - b.theta).cwiseAbs().maxCoeff(), 0.0);
}

TEST(CorrDpSgd, ProjectionClampsTheInitialIterate) {
  const Dataset d = SmallQuadratic(10, 3, 33);
  LossSpec loss;
  loss.kind = LossKind::kSquaredError;
  TrainConfig cfg;
  cfg.iterations = 1;
  cfg.step_size = 0.0;
  cfg.param_bound = 2.0;
  cfg.theta0 = Eigen::VectorXd::Constant(3, 4.0 / std::sqrt(3.0));  // norm 4
  RandomState rng(3, "proj");
  const FitResult fit =
      CorrDpSgd(d, FeaturePartition::LeadingSensitive(3, 1), loss, cfg,
                ZeroNoise(Method::kNonPrivate, 3), rng);
  EXPECT_NEAR(fit.theta.norm(), 2.0, 1e-12);
}

TEST(CorrDpSgd, DeterministicForFixedSeedAndConfig) {
  const Dataset d = SmallQuadratic(30, 3, 34);
  const FeaturePartition part = FeaturePartition::LeadingSensitive(3, 1);
  TVProfile tv = TVProfile::Uniform(part, 0.5);
  LossSpec loss;
  loss.kind = LossKind::kSquaredError;
  TrainConfig cfg;
  cfg.iterations = 150;
  cfg.step_size = 0.01;
  cfg.method = Method::kCorrDp;
  const NoiseProfile noise = CalibrateNoise(Method::kCorrDp, part, &tv, 1.0,
                                            1e-4, 1.0, 150, 30, 3, 1.0, true);
  RandomState rng1(11, "det");
  RandomState rng2(11, "det");
  const FitResult a = CorrDpSgd(d, part, loss, cfg, noise, rng1);
  const FitResult b = CorrDpSgd(d, part, loss, cfg, noise, rng2);
  EXPECT_EQ((a.theta - b.theta).cwiseAbs().maxCoeff(), 0.0);
}

// The decaying rule starts at D / sqrt(L^2 + total variance) and shrinks as
// 1/sqrt(t): verified against a hand-computed two-step trajectory on a
// one-sample quadratic.
TEST(CorrDpSgd, DecayingStepSizesMatchTheClosedForm) {
  Dataset d;
  d.features.resize(1, 2);
  d.features << 1.0, 0.0;
  d.labels = Eigen::VectorXd::Zero(1);
  LossSpec loss;
  loss.kind = LossKind::kSquaredError;
  const double lipschitz = 3.0;
  const double bound = 1.0;
  TrainConfig cfg;
  cfg.step_rule = StepRule::kPaperDecay;
  cfg.param_bound = bound;
  cfg.theta0 = Eigen::VectorXd::Zero(2);
  cfg.theta0(0) = 0.1;
  // Gradient at theta is (2 theta_0, 0); alpha_t = D / sqrt(L^2 t).
  double expected = 0.1;
  for (int t = 1; t <= 3; ++t) {
    cfg.iterations = t;
    RandomState rng(1, "alpha");
    const FitResult fit =
        CorrDpSgd(d, FeaturePartition::LeadingSensitive(2, 1), loss, cfg,
                  ZeroNoise(Method::kNonPrivate, 2, lipschitz), rng);
    const double alpha = bound / std::sqrt(lipschitz * lipschitz * t);
    expected *= (1.0 - 2.0 * alpha);
    EXPECT_NEAR(fit.theta(0), expected, 1e-15) << "T=" << t;
    if (t > 1) {
      const double previous =
          bound / std::sqrt(lipschitz * lipschitz * (t - 1));
      EXPECT_LT(alpha, previous);
    }
  }
}

// Noiseless decaying-step descent on a strongly convex quadratic moves
// monotonically toward the minimizer once past a short burn-in.
TEST(CorrDpSgd, DecayingStepsContractTowardTheOptimum) {
  const Dataset d = SmallQuadratic(80, 5, 35);
  LossSpec loss;
  loss.kind = LossKind::kSquaredError;
  const Eigen::VectorXd optimum =
      (d.features.transpose() * d.features)
          .ldlt()
          .solve(d.features.transpose() * d.labels);
  double previous = std::numeric_limits<double>::infinity();
  for (int iterations = 40; iterations <= 120; iterations += 10) {
    TrainConfig cfg;
    cfg.iterations = iterations;
    cfg.step_rule = StepRule::kPaperDecay;
    cfg.param_bound = 2.0 * optimum.norm();
    RandomState rng(5, "decay");
    const FitResult fit =
        CorrDpSgd(d, FeaturePartition::LeadingSensitive(5, 2), loss, cfg,
                  ZeroNoise(Method::kNonPrivate, 5, 20.0), rng);
    const double distance = (fit.theta - optimum).norm();
    EXPECT_LE(distance, previous + 1e-12) << "T=" << iterations;
    previous = distance;
  }
}

TEST(CorrDpSgd, MiniBatchSamplingSchemesRun) {
  const Dataset d = SmallQuadratic(50, 3, 36);
  const FeaturePartition part = FeaturePartition::LeadingSensitive(3, 1);
  LossSpec loss;
  loss.kind = LossKind::kSquaredError;
  TrainConfig cfg;
  cfg.iterations = 100;
  cfg.step_size = 0.01;
  cfg.batch = 10;
  RandomState rng1(9, "mb");
  const FitResult without =
      CorrDpSgd(d, part, loss, cfg, ZeroNoise(Method::kNonPrivate, 3), rng1);
  cfg.sampling = SamplingScheme::kPoisson;
  RandomState rng2(9, "mb");
  const FitResult poisson =
      CorrDpSgd(d, part, loss, cfg, ZeroNoise(Method::kNonPrivate, 3), rng2);
  EXPECT_TRUE(without.theta.allFinite());
  EXPECT_TRUE(poisson.theta.allFinite());
}

TEST(CorrDpSgd, PartialTrainsOnInsensitiveColumnsOnly) {
  const Dataset d = SmallQuadratic(50, 4, 37);
  const FeaturePartition part = FeaturePartition::LeadingSensitive(4, 1);
  LossSpec loss;
  loss.kind = LossKind::kSquaredError;
  TrainConfig cfg;
  cfg.iterations = 2000;
  cfg.step_size = 0.02;
  cfg.method = Method::kPartial;
  RandomState rng(13, "partial");
  const FitResult fit =
      CorrDpSgd(d, part, loss, cfg, ZeroNoise(Method::kPartial, 4), rng);
  EXPECT_TRUE(fit.partial);
  EXPECT_EQ(fit.theta.size(), 3);
  const Eigen::VectorXd embedded = EmbedColumns(fit.theta, fit.columns, 4);
  EXPECT_DOUBLE_EQ(embedded(0), 0.0);
}

TEST(ReferenceSolution, MatchesNormalEquationsOnAQuadratic) {
  const Dataset d = SmallQuadratic(60, 4, 38);
  LossSpec loss;
  loss.kind = LossKind::kSquaredError;
  const FitResult fit = ReferenceSolution(d, loss, 1e-10);
  EXPECT_TRUE(fit.converged);
  const Eigen::VectorXd normal_equations =
      (d.features.transpose() * d.features)
          .ldlt()
          .solve(d.features.transpose() * d.labels);
  EXPECT_LE((fit.theta - normal_equations).norm(), 1e-6);
}

TEST(ReferenceSolution, SeparableLogisticWithProjectionHitsTheBoundary) {
  Dataset d;
  d.features.resize(20, 1);
  d.labels.resize(20);
  for (int r = 0; r < 20; ++r) {
    const double x = (r < 10) ? -1.0 - 0.1 * r : 1.0 + 0.1 * (r - 10);
    d.features(r, 0) = x;
    d.labels(r) = x > 0 ? 1.0 : 0.0;
  }
  LossSpec loss;
  loss.kind = LossKind::kLogistic;
  const FitResult fit = ReferenceSolution(d, loss, 1e-10, 20000, 1.0);
  // The unconstrained optimum is unbounded, so the solver stops on the ball.
  EXPECT_NEAR(fit.theta.norm(), 1.0, 1e-6);
}

TEST(ReferenceSolution, InfiniteToleranceReturnsTheInitialPoint) {
  const Dataset d = SmallQuadratic(20, 3, 39);
  LossSpec loss;
  loss.kind = LossKind::kSquaredError;
  const FitResult fit =
      ReferenceSolution(d, loss, std::numeric_limits<double>::infinity());
  EXPECT_DOUBLE_EQ(fit.theta.norm(), 0.0);
  EXPECT_TRUE(fit.converged);
}

TEST(UtilityGap, ZeroForTheReferenceItselfAndPositiveForWorsePoints) {
  const Dataset d = SmallQuadratic(40, 3, 40);
  LossSpec loss;
  loss.kind = LossKind::kRidge;
  loss.ridge_lambda = 1.0;
  const FitResult reference = ReferenceSolution(d, loss, 1e-10);
  EXPECT_DOUBLE_EQ(
      UtilityGap(d, loss, reference.theta, reference.theta), 0.0);
  Eigen::VectorXd worse = reference.theta;
  worse(0) += 0.5;
  EXPECT_GT(UtilityGap(d, loss, worse, reference.theta), 0.0);
}

TEST(RunMethodSuite, NonPrivateGapVanishes) {
  const Dataset d = SmallQuadratic(100, 4, 41);
  const FeaturePartition part = FeaturePartition::LeadingSensitive(4, 1);
  LossSpec loss;
  loss.kind = LossKind::kRidge;
  loss.ridge_lambda = 1.0;
  TVProfile tv = TVProfile::Uniform(part, 0.5);
  SuiteOptions options;
  options.methods = {Method::kNonPrivate};
  options.eps_grid = {1.0};
  options.seeds = {1};
  options.base.iterations = 20000;
  options.base.step_size = 0.02;
  options.jobs = 1;
  const SuiteResult suite =
      RunMethodSuite(d, part, loss, tv, options, RandomState(5, "suite"));
  ASSERT_EQ(suite.cells.size(), 1u);
  EXPECT_FALSE(suite.cells[0].failed);
  EXPECT_LE(std::abs(suite.cells[0].utility_gap), 1e-3);
}

TEST(RunMethodSuite, ParallelAndSerialTablesAreIdentical) {
  const Dataset d = SmallQuadratic(60, 4, 42);
  const FeaturePartition part = FeaturePartition::LeadingSensitive(4, 2);
  LossSpec loss;
  loss.kind = LossKind::kSquaredError;
  TVProfile tv = TVProfile::Uniform(part, 0.3);
  SuiteOptions options;
  options.methods = {Method::kStandard, Method::kCorrDp, Method::kSemi};
  options.eps_grid = {0.5, 1.0};
  options.seeds = {1, 2};
  options.base.iterations = 100;
  options.base.step_size = 0.005;
  options.lipschitz = 1.0;

  options.jobs = 1;
  const SuiteResult serial =
      RunMethodSuite(d, part, loss, tv, options, RandomState(6, "suite"));
  options.jobs = 4;
  const SuiteResult parallel =
      RunMethodSuite(d, part, loss, tv, options, RandomState(6, "suite"));
  ASSERT_EQ(serial.cells.size(), parallel.cells.size());
  for (std::size_t i = 0; i < serial.cells.size(); ++i) {
    EXPECT_EQ(serial.cells[i].utility_gap, parallel.cells[i].utility_gap);
    EXPECT_EQ(serial.cells[i].seed, parallel.cells[i].seed);
  }
}

TEST(RunMethodSuite, FailedCellsAreRecordedNotFatal) {
  const Dataset d = SmallQuadratic(30, 3, 43);
  const FeaturePartition part = FeaturePartition::LeadingSensitive(3, 1);
  LossSpec loss;
  loss.kind = LossKind::kSquaredError;
  TVProfile incomplete;  // missing the insensitive entries
  SuiteOptions options;
  options.methods = {Method::kCorrDp};
  options.eps_grid = {1.0};
  options.seeds = {1};
  options.base.iterations = 10;
  options.jobs = 1;
  const SuiteResult suite = RunMethodSuite(d, part, loss, incomplete, options,
                                           RandomState(7, "suite"));
  ASSERT_EQ(suite.cells.size(), 1u);
  EXPECT_TRUE(suite.cells[0].failed);
  EXPECT_NE(suite.cells[0].error.find("ProfileError"), std::string::npos);
}

}  // namespace
}  // namespace corrdp
