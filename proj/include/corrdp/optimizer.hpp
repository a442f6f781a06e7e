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

#ifndef CORRDP_OPTIMIZER_HPP_
#define CORRDP_OPTIMIZER_HPP_

#include <Eigen/Core>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "corrdp/dataset.hpp"
#include "corrdp/errors.hpp"
#include "corrdp/losses.hpp"
#include "corrdp/random.hpp"
#include "corrdp/tv_estimation.hpp"

namespace corrdp {

enum class Method { kNonPrivate, kStandard, kSemi, kPartial, kCorrDp };

inline std::string ToString(Method method) {
  switch (method) {
    case Method::kNonPrivate: return "nonprivate";
    case Method::kStandard: return "standard";
    case Method::kSemi: return "semi";
    case Method::kPartial: return "partial";
    case Method::kCorrDp: return "corrdp";
  }
  return "unknown";
}

inline Method MethodFromString(const std::string& name) {
  if (name == "nonprivate") return Method::kNonPrivate;
  if (name == "standard") return Method::kStandard;
  if (name == "semi") return Method::kSemi;
  if (name == "partial") return Method::kPartial;
  if (name == "corrdp") return Method::kCorrDp;
  throw ConfigError("unknown method '" + name + "'");
}

// Per-coordinate Gaussian noise variances for gradient perturbation, plus the
// inputs that produced them.
struct NoiseProfile {
  Eigen::VectorXd sigma_sq;
  Method method = Method::kNonPrivate;
  double epsilon = 0;
  double delta = 0;
  double lipschitz = 0;
  double feature_bound = 0;  // 0 when the norm-bound factor is disabled
  int iterations = 0;
  int n = 0;
  int m_s = 0;
  bool degenerate_floor = false;  // m_s == 0 under the correlation-aware rule

  double TotalVariance() const { return sigma_sq.sum(); }
};

// Noise calibration.  The base variance is
//   (log(1/delta) + 1) * L^2 * T * [B^2] / (n^2 eps^2),
// with the feature-norm factor B^2 included by default (the privacy argument
// requires it; disable via include_norm_bound for the bare variant).
// Correlation-aware noise keeps the base on sensitive coordinates and scales
// insensitive ones by max{TV(i), (m_s/m)^2}; uniform noise uses the base
// everywhere; sensitive-only noise zeroes the insensitive block.
inline NoiseProfile CalibrateNoise(Method method, const FeaturePartition& part,
                                   const TVProfile* tv, double epsilon,
                                   double delta, double lipschitz,
                                   int iterations, int n, int m,
                                   double feature_bound = 0.0,
                                   bool include_norm_bound = true) {
  NoiseProfile profile;
  profile.method = method;
  profile.epsilon = epsilon;
  profile.delta = delta;
  profile.lipschitz = lipschitz;
  profile.iterations = iterations;
  profile.n = n;
  profile.m_s = part.num_sensitive();
  profile.sigma_sq = Eigen::VectorXd::Zero(m);
  if (method == Method::kNonPrivate || method == Method::kPartial) {
    return profile;
  }
  if (!(epsilon > 0) || !(delta > 0 && delta < 1)) {
    throw ParameterError("private methods need epsilon > 0 and delta in (0,1)");
  }
  if (iterations < 1 || n < 1 || !(lipschitz > 0)) {
    throw ParameterError("need positive iterations, rows, and Lipschitz bound");
  }
  double base = (std::log(1.0 / delta) + 1.0) * lipschitz * lipschitz *
                iterations / (static_cast<double>(n) * n * epsilon * epsilon);
  if (include_norm_bound) {
    if (!(feature_bound > 0)) {
      throw ParameterError("norm-bound factor requested but bound not given");
    }
    base *= feature_bound * feature_bound;
    profile.feature_bound = feature_bound;
  }
  for (int i : part.sensitive) profile.sigma_sq(i) = base;
  const double m_s = part.num_sensitive();
  const double floor = (m_s / m) * (m_s / m);
  switch (method) {
    case Method::kStandard:
      for (int i : part.insensitive) profile.sigma_sq(i) = base;
      break;
    case Method::kSemi:
      break;  // insensitive coordinates stay unnoised
    case Method::kCorrDp: {
      if (tv == nullptr) {
        throw ProfileError("correlation-aware calibration needs a TV profile");
      }
      tv->CheckCovers(part);
      profile.degenerate_floor = part.num_sensitive() == 0;
      for (int i : part.insensitive) {
        profile.sigma_sq(i) =
            base * std::max(tv->values.at(i), floor);
      }
      break;
    }
    default:
      break;
  }
  return profile;
}

enum class StepRule { kPaperDecay, kConstant };
enum class SamplingScheme { kWithoutReplacement, kPoisson };

struct TrainConfig {
  int iterations = 1000;
  int batch = 0;  // 0 or >= n means full batch
  StepRule step_rule = StepRule::kConstant;
  double step_size = 0.001;        // kConstant
  double param_bound = 0.0;        // projection radius D; 0 disables
  Method method = Method::kNonPrivate;
  double epsilon = 1.0;
  double delta = 1e-4;
  std::uint64_t seed = 0;
  SamplingScheme sampling = SamplingScheme::kWithoutReplacement;
  bool average_iterates = false;   // off for all reported results
  bool record_trace = false;
  Eigen::VectorXd theta0;          // empty -> zeros
};

struct FitResult {
  Eigen::VectorXd theta;
  std::vector<double> trace;
  double utility_gap = std::numeric_limits<double>::quiet_NaN();
  double wallclock_s = 0;
  bool converged = true;
  bool partial = false;        // theta spans only the listed columns
  std::vector<int> columns;    // column mapping when partial
};

namespace internal {

inline Eigen::VectorXd ProjectBall(Eigen::VectorXd v, double radius) {
  if (radius > 0) {
    const double norm = v.norm();
    if (norm > radius) v *= radius / norm;
  }
  return v;
}

}  // namespace internal

// Noisy projected (stochastic) gradient descent.  Each iteration samples a
// mini-batch, perturbs the mean gradient with N(0, diag(sigma_sq)), steps,
// and projects onto the radius-D ball when projection is enabled.  Under the
// decaying rule the step size is alpha_t = D / sqrt((L^2 + sum sigma^2) t);
// the profile's Lipschitz constant supplies L.  The returned parameter is the
// final iterate.
inline FitResult CorrDpSgd(const Dataset& d, const FeaturePartition& part,
                           const LossSpec& loss, const TrainConfig& cfg,
                           const NoiseProfile& noise, RandomState& rng) {
  d.Validate();
  const auto start = std::chrono::steady_clock::now();
  const bool partial = cfg.method == Method::kPartial;
  std::vector<int> columns;
  if (partial) {
    columns = part.insensitive;
    if (columns.empty()) throw SpecError("no insensitive columns to train on");
  } else {
    columns.resize(static_cast<std::size_t>(d.m()));
    for (int j = 0; j < d.m(); ++j) columns[static_cast<std::size_t>(j)] = j;
  }
  const int dim = static_cast<int>(columns.size());
  if (noise.sigma_sq.size() != d.m()) {
    throw ShapeError("noise profile dimension does not match the dataset");
  }
  if (noise.method != cfg.method) {
    throw ParameterError("noise profile was calibrated for a different method");
  }
  if (cfg.iterations < 1) throw ParameterError("need at least one iteration");
  if (cfg.batch < 0 || cfg.batch > d.n()) {
    throw ParameterError("batch size out of range");
  }
  if (cfg.step_rule == StepRule::kPaperDecay && !(cfg.param_bound > 0)) {
    throw ParameterError("decaying steps require a positive parameter bound");
  }

  Eigen::MatrixXd X(d.n(), dim);
  for (int c = 0; c < dim; ++c) {
    X.col(c) = d.features.col(columns[static_cast<std::size_t>(c)]);
  }
  Eigen::VectorXd sigma(dim);
  for (int c = 0; c < dim; ++c) {
    sigma(c) = std::sqrt(noise.sigma_sq(columns[static_cast<std::size_t>(c)]));
  }
  const double total_variance = noise.TotalVariance();
  const double lipschitz = noise.lipschitz > 0 ? noise.lipschitz : 0.0;

  Eigen::VectorXd theta = cfg.theta0.size() == dim
                              ? cfg.theta0
                              : Eigen::VectorXd::Zero(dim);
  if (cfg.theta0.size() != 0 && cfg.theta0.size() != dim) {
    throw ShapeError("initial parameter has the wrong dimension");
  }
  Eigen::VectorXd average = Eigen::VectorXd::Zero(dim);
  const int batch = (cfg.batch == 0 || cfg.batch >= d.n()) ? d.n() : cfg.batch;
  const bool full_batch = batch == d.n();
  const bool use_clip = loss.clip.has_value();
  const double ridge =
      loss.kind == LossKind::kRidge ? 2.0 * loss.ridge_lambda / d.n() : 0.0;

  FitResult result;
  if (cfg.record_trace) result.trace.reserve(cfg.iterations);

  Eigen::VectorXd grad(dim);
  Eigen::VectorXd margins;
  for (int t = 1; t <= cfg.iterations; ++t) {
    theta = internal::ProjectBall(std::move(theta), cfg.param_bound);

    if (full_batch && !use_clip && loss.kind != LossKind::kLogistic) {
      margins.noalias() = X * theta;
      margins -= d.labels;
      grad.noalias() = X.transpose() * margins;
      grad *= 2.0 / d.n();
    } else if (full_batch && !use_clip) {
      margins.noalias() = X * theta;
      for (int r = 0; r < d.n(); ++r) {
        margins(r) = Sigmoid(margins(r)) - d.labels(r);
      }
      grad.noalias() = X.transpose() * margins;
      grad /= d.n();
    } else {
      std::vector<int> rows;
      if (full_batch) {
        rows.resize(static_cast<std::size_t>(d.n()));
        for (int r = 0; r < d.n(); ++r) rows[static_cast<std::size_t>(r)] = r;
      } else if (cfg.sampling == SamplingScheme::kPoisson) {
        const double rate = static_cast<double>(batch) / d.n();
        for (int r = 0; r < d.n(); ++r) {
          if (rng.Uniform() < rate) rows.push_back(r);
        }
        if (rows.empty()) rows.push_back(static_cast<int>(
            rng.UniformInt(static_cast<std::uint64_t>(d.n()))));
      } else {
        rows = rng.SampleWithoutReplacement(d.n(), batch);
      }
      grad.setZero();
      for (int r : rows) {
        grad += LossGradient(loss, theta, X.row(r).transpose(), d.labels(r));
      }
      grad /= static_cast<double>(rows.size());
    }
    if (ridge > 0) grad += ridge * theta;

    for (int c = 0; c < dim; ++c) {
      if (sigma(c) > 0) grad(c) += sigma(c) * rng.Normal();
    }

    const double alpha =
        cfg.step_rule == StepRule::kPaperDecay
            ? cfg.param_bound /
                  std::sqrt((lipschitz * lipschitz + total_variance) * t)
            : cfg.step_size;
    theta -= alpha * grad;
    theta = internal::ProjectBall(std::move(theta), cfg.param_bound);

    if (!theta.allFinite()) {
      throw DivergenceError("non-finite iterate at iteration " +
                            std::to_string(t));
    }
    if (cfg.average_iterates) average += theta;
    if (cfg.record_trace) {
      Eigen::VectorXd full = Eigen::VectorXd::Zero(d.m());
      for (int c = 0; c < dim; ++c) {
        full(columns[static_cast<std::size_t>(c)]) = theta(c);
      }
      result.trace.push_back(Objective(loss, d, full));
    }
  }

  result.theta = cfg.average_iterates ? (average / cfg.iterations) : theta;
  result.partial = partial;
  result.columns = columns;
  result.wallclock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

// Non-private full gradient descent to gradient norm <= tol (or the iteration
// cap, recorded as converged = false).  The step size is set from a power
// estimate of the largest Hessian eigenvalue.
inline FitResult ReferenceSolution(const Dataset& d, const LossSpec& loss,
                                   double tol = 1e-8, int max_iterations = 500000,
                                   double param_bound = 0.0) {
  d.Validate();
  const auto start = std::chrono::steady_clock::now();
  const int m = d.m();
  // Largest eigenvalue of X^T X / n via power iteration.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m).normalized();
  double top = 1.0;
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXd w = d.features.transpose() * (d.features * v) / d.n();
    top = w.norm();
    if (top <= 0) break;
    v = w / top;
  }
  double curvature = loss.kind == LossKind::kLogistic ? 0.25 * top : 2.0 * top;
  if (loss.kind == LossKind::kRidge) curvature += 2.0 * loss.ridge_lambda / d.n();
  const double alpha = curvature > 0 ? 1.0 / curvature : 1.0;

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(m);
  FitResult result;
  result.converged = false;
  for (int t = 0; t < max_iterations; ++t) {
    const Eigen::VectorXd grad = ObjectiveGradient(loss, d, theta);
    if (grad.norm() <= tol) {
      result.converged = true;
      break;
    }
    theta = internal::ProjectBall(theta - alpha * grad, param_bound);
  }
  result.theta = theta;
  result.wallclock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

// Zero-pads a partial (insensitive-only) parameter onto the full coordinate
// space for evaluation.
inline Eigen::VectorXd EmbedColumns(const Eigen::VectorXd& theta,
                                    const std::vector<int>& columns, int m) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(m);
  if (static_cast<int>(columns.size()) != theta.size()) {
    throw ShapeError("column mapping does not match parameter size");
  }
  for (int c = 0; c < theta.size(); ++c) {
    full(columns[static_cast<std::size_t>(c)]) = theta(c);
  }
  return full;
}

// Excess empirical objective of the private parameter over the reference.
inline double UtilityGap(const Dataset& d, const LossSpec& loss,
                         const Eigen::VectorXd& theta_priv,
                         const Eigen::VectorXd& theta_hat) {
  return Objective(loss, d, theta_priv) - Objective(loss, d, theta_hat);
}

struct CellResult {
  Method method = Method::kNonPrivate;
  double epsilon = 0;
  double delta = 0;
  std::uint64_t seed = 0;
  double utility_gap = std::numeric_limits<double>::quiet_NaN();
  double accuracy = std::numeric_limits<double>::quiet_NaN();
  double wallclock_s = 0;
  bool failed = false;
  std::string error;
};

struct AggregateResult {
  Method method = Method::kNonPrivate;
  double epsilon = 0;
  int count = 0;
  double mean_gap = 0;
  double std_gap = 0;
  double mean_accuracy = std::numeric_limits<double>::quiet_NaN();
  double std_accuracy = std::numeric_limits<double>::quiet_NaN();
};

struct SuiteResult {
  std::vector<CellResult> cells;        // canonical (method, eps, seed) order
  std::vector<AggregateResult> aggregates;
  Eigen::VectorXd theta_hat;
  bool reference_converged = true;
};

struct SuiteOptions {
  std::vector<Method> methods;
  std::vector<double> eps_grid;
  double delta = 1e-4;
  std::vector<std::uint64_t> seeds;
  TrainConfig base;                 // iterations/batch/step rule/projection
  double lipschitz = 1.0;           // declared L for noise calibration
  bool include_norm_bound = true;   // multiply the base variance by B^2
  int jobs = 0;                     // 0 -> hardware concurrency
  double reference_tol = 1e-8;
  std::function<void(const CellResult&)> on_cell;  // serialized callback
};

// Runs the (method x epsilon x seed) grid.  Cells execute on a worker pool,
// each under its own derived random stream, so parallel and serial execution
// produce identical tables; the per-cell callback fires in canonical order.
inline SuiteResult RunMethodSuite(const Dataset& d,
                                  const FeaturePartition& part,
                                  const LossSpec& loss, const TVProfile& tv,
                                  const SuiteOptions& options,
                                  const RandomState& base_rng) {
  d.Validate();
  if (options.methods.empty() || options.eps_grid.empty() ||
      options.seeds.empty()) {
    throw ParameterError("need at least one method, epsilon, and seed");
  }
  SuiteResult suite;
  const FitResult reference =
      ReferenceSolution(d, loss, options.reference_tol, 500000,
                        options.base.param_bound);
  suite.theta_hat = reference.theta;
  suite.reference_converged = reference.converged;
  const double bound = FeatureBound(d);
  const bool classify = loss.kind == LossKind::kLogistic;

  struct Cell {
    Method method;
    double epsilon;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (Method method : options.methods) {
    for (double eps : options.eps_grid) {
      for (std::uint64_t seed : options.seeds) {
        cells.push_back({method, eps, seed});
      }
    }
  }
  suite.cells.resize(cells.size());

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= cells.size()) return;
      const Cell& cell = cells[k];
      CellResult& out = suite.cells[k];
      out.method = cell.method;
      out.epsilon = cell.epsilon;
      out.delta = options.delta;
      out.seed = cell.seed;
      try {
        TrainConfig cfg = options.base;
        cfg.method = cell.method;
        cfg.epsilon = cell.epsilon;
        cfg.delta = options.delta;
        cfg.seed = cell.seed;
        const NoiseProfile noise = CalibrateNoise(
            cell.method, part, &tv, cell.epsilon, options.delta,
            options.lipschitz, cfg.iterations, d.n(), d.m(), bound,
            options.include_norm_bound);
        RandomState rng = base_rng.Derive(
            "train/method=" + ToString(cell.method) +
            "/eps=" + std::to_string(cell.epsilon) +
            "/seed=" + std::to_string(cell.seed));
        // The insensitive-only baseline trains unregularized; the gap is
        // still evaluated under the experiment's objective.
        LossSpec train_loss = loss;
        if (cell.method == Method::kPartial &&
            train_loss.kind == LossKind::kRidge) {
          train_loss.kind = LossKind::kSquaredError;
        }
        FitResult fit = CorrDpSgd(d, part, train_loss, cfg, noise, rng);
        const Eigen::VectorXd full =
            fit.partial ? EmbedColumns(fit.theta, fit.columns, d.m())
                        : fit.theta;
        out.utility_gap = UtilityGap(d, loss, full, suite.theta_hat);
        if (classify) out.accuracy = ClassificationAccuracy(d, full);
        out.wallclock_s = fit.wallclock_s;
      } catch (const Error& e) {
        out.failed = true;
        out.error = std::string(e.tag()) + ": " + e.what();
      }
    }
  };

  int jobs = options.jobs > 0
                 ? options.jobs
                 : static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  jobs = std::min<int>(jobs, static_cast<int>(cells.size()));
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back(work);
    for (auto& thread : pool) thread.join();
  }
  if (options.on_cell) {
    for (const CellResult& cell : suite.cells) options.on_cell(cell);
  }

  for (Method method : options.methods) {
    for (double eps : options.eps_grid) {
      AggregateResult agg;
      agg.method = method;
      agg.epsilon = eps;
      std::vector<double> gaps;
      std::vector<double> accs;
      for (const CellResult& cell : suite.cells) {
        if (cell.method != method || cell.epsilon != eps || cell.failed) {
          continue;
        }
        gaps.push_back(cell.utility_gap);
        if (classify) accs.push_back(cell.accuracy);
      }
      agg.count = static_cast<int>(gaps.size());
      if (agg.count > 0) {
        double mean = 0;
        for (double g : gaps) mean += g;
        mean /= agg.count;
        double var = 0;
        for (double g : gaps) var += (g - mean) * (g - mean);
        agg.mean_gap = mean;
        agg.std_gap = agg.count > 1 ? std::sqrt(var / (agg.count - 1)) : 0.0;
        if (classify && !accs.empty()) {
          double am = 0;
          for (double a : accs) am += a;
          am /= accs.size();
          double av = 0;
          for (double a : accs) av += (a - am) * (a - am);
          agg.mean_accuracy = am;
          agg.std_accuracy =
              accs.size() > 1 ? std::sqrt(av / (accs.size() - 1)) : 0.0;
        }
      }
      suite.aggregates.push_back(agg);
    }
  }
  return suite;
}

}  // namespace corrdp

#endif  // CORRDP_OPTIMIZER_HPP_
