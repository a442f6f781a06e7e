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

// Command-line front end: dataset generation and ingestion, TV estimation,
// private training, experiment grids, and certification, driven by an INI
// config file.  Exit codes: 0 success, 2 config/validation error, 3
// runtime/numeric error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "corrdp/corrdp.hpp"

namespace {

namespace fs = std::filesystem;
using namespace corrdp;

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> jobs;
};

ExperimentConfig LoadConfig(const GlobalFlags& flags) {
  if (flags.config_path.empty()) {
    throw ConfigError("--config is required");
  }
  ExperimentConfig cfg = ExperimentConfig::Load(flags.config_path);
  if (flags.seed.has_value()) cfg.dataset.seed = *flags.seed;
  if (flags.out_dir.has_value()) cfg.output.directory = *flags.out_dir;
  if (flags.jobs.has_value()) cfg.jobs = *flags.jobs;
  return cfg;
}

struct LoadedData {
  Dataset dataset;
  FeaturePartition partition;
  std::optional<FeatureInfo> info;
  std::optional<GaussianSpec> spec;  // known generator (synthetic only)
};

LoadedData LoadDataset(const ExperimentConfig& cfg) {
  LoadedData data;
  if (cfg.dataset.kind == "synthetic") {
    GaussianSpec spec = DefaultSyntheticSpec(cfg.dataset.m, cfg.dataset.m_s);
    spec.noise_std = cfg.dataset.noise_std;
    RandomState rng(cfg.dataset.seed, "synth");
    data.dataset = GenerateSynthetic(spec, cfg.dataset.n, rng);
    data.partition =
        FeaturePartition::LeadingSensitive(cfg.dataset.m, cfg.dataset.m_s);
    data.spec = std::move(spec);
  } else {
    if (cfg.dataset.csv_path.empty() || cfg.dataset.schema_path.empty()) {
      throw ConfigError("csv datasets need dataset.path and dataset.schema");
    }
    const CsvSchema schema = LoadSchema(cfg.dataset.schema_path);
    IngestResult result = IngestCsv(cfg.dataset.csv_path, schema);
    data.dataset = std::move(result.dataset);
    data.partition = std::move(result.partition);
    data.info = std::move(result.info);
  }
  return data;
}

TVProfile BuildProfile(const ExperimentConfig& cfg, const LoadedData& data) {
  if (cfg.tv.strategy == "frozen") {
    if (cfg.tv.profile_path.empty()) {
      throw ConfigError("tv.strategy = frozen needs tv.profile");
    }
    TVProfile profile = LoadTvProfile(cfg.tv.profile_path);
    profile.CheckCovers(data.partition);
    return profile;
  }
  TvStrategy strategy;
  strategy.default_estimator = TvEstimatorFromString(cfg.tv.strategy);
  strategy.delta = cfg.tv.delta;
  strategy.histogram_bins = cfg.tv.histogram_bins;
  if (data.info.has_value()) strategy.feature_info = &*data.info;
  if (strategy.default_estimator == TvEstimatorKind::kExactPosterior) {
    if (!data.spec.has_value()) {
      throw ConfigError("exact TV strategy requires a synthetic dataset");
    }
    strategy.known_spec = &*data.spec;
  }
  TVProfile profile = BuildTvProfile(data.dataset, data.partition, strategy);
  if (cfg.tv.adjust) {
    profile = ConfidenceAdjust(profile, cfg.tv.c2, cfg.tv.gamma,
                               data.dataset.n(), data.dataset.m(),
                               data.partition.num_sensitive(), cfg.tv.delta);
  }
  return profile;
}

double ResolveLipschitz(const ExperimentConfig& cfg, const LoadedData& data,
                        const LossSpec& loss) {
  if (cfg.train.lipschitz > 0) return cfg.train.lipschitz;
  const double bound = FeatureBound(data.dataset);
  const double max_label = data.dataset.labels.cwiseAbs().maxCoeff();
  return loss.DeriveLipschitz(bound, max_label);
}

LossSpec MakeLossSpec(const ExperimentConfig& cfg) {
  LossSpec loss;
  loss.kind = cfg.train.loss;
  loss.ridge_lambda = cfg.train.ridge_lambda;
  loss.param_bound = cfg.train.param_bound > 0 ? cfg.train.param_bound : 1.0;
  loss.clip = cfg.train.clip;
  return loss;
}

TrainConfig MakeTrainConfig(const ExperimentConfig& cfg) {
  TrainConfig train;
  train.iterations = cfg.train.iterations;
  train.batch = cfg.train.batch;
  train.step_rule = cfg.train.step_rule == "decay" ? StepRule::kPaperDecay
                                                   : StepRule::kConstant;
  train.step_size = cfg.train.alpha;
  train.param_bound = cfg.train.param_bound;
  train.delta = cfg.train.delta;
  return train;
}

void EnsureOutDir(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.output.directory);
}

int CmdSynth(const GlobalFlags& flags) {
  const ExperimentConfig cfg = LoadConfig(flags);
  if (cfg.dataset.kind != "synthetic") {
    throw ConfigError("synth requires dataset.kind = synthetic");
  }
  if (cfg.dataset.n < 1) throw ConfigError("dataset.n must be positive");
  EnsureOutDir(cfg);
  const LoadedData data = LoadDataset(cfg);
  std::vector<std::string> names;
  for (int j = 0; j < data.dataset.m(); ++j) {
    names.push_back("x" + std::to_string(j + 1));
  }
  const std::string csv_path =
      (fs::path(cfg.output.directory) / "synthetic.csv").string();
  ExportCsv(data.dataset, names, "y", csv_path);
  SaveDatasetMeta(*data.spec, data.partition, cfg.dataset.n, cfg.dataset.seed,
                  (fs::path(cfg.output.directory) / "synthetic.meta.json")
                      .string());
  std::cout << "wrote " << csv_path << " (" << data.dataset.n() << " x "
            << data.dataset.m() << ")\n";
  return 0;
}

int CmdIngest(const GlobalFlags& flags) {
  const ExperimentConfig cfg = LoadConfig(flags);
  if (cfg.dataset.kind != "csv") {
    throw ConfigError("ingest requires dataset.kind = csv");
  }
  EnsureOutDir(cfg);
  const LoadedData data = LoadDataset(cfg);
  const std::string csv_path =
      (fs::path(cfg.output.directory) / "ingested.csv").string();
  ExportCsv(data.dataset, data.info->column_names, "y", csv_path);
  Json meta;
  meta["n"] = data.dataset.n();
  meta["m"] = data.dataset.m();
  Json sensitive = Json::array();
  for (int i : data.partition.sensitive) sensitive.push_back(i + 1);
  meta["sensitive_features"] = sensitive;
  meta["columns"] = data.info->column_names;
  std::ofstream meta_out(
      (fs::path(cfg.output.directory) / "ingested.meta.json").string());
  meta_out << meta.dump(2) << "\n";
  std::cout << "wrote " << csv_path << " (" << data.dataset.n() << " x "
            << data.dataset.m() << ")\n";
  return 0;
}

int CmdEstimateTv(const GlobalFlags& flags) {
  const ExperimentConfig cfg = LoadConfig(flags);
  EnsureOutDir(cfg);
  const LoadedData data = LoadDataset(cfg);
  const TVProfile profile = BuildProfile(cfg, data);
  const std::string path =
      (fs::path(cfg.output.directory) / "tv_profile.json").string();
  SaveTvProfile(profile, path);
  std::cout << "wrote " << path << " (" << profile.values.size()
            << " features, kind " << ToString(profile.kind) << ")\n";
  return 0;
}

void WriteCellRow(std::FILE* f, const CellResult& cell) {
  std::fprintf(f, "%s,%.17g,%.17g,%llu,", ToString(cell.method).c_str(),
               cell.epsilon, cell.delta,
               static_cast<unsigned long long>(cell.seed));
  if (cell.failed) {
    std::fprintf(f, ",,error:%s\n", cell.error.c_str());
  } else {
    std::fprintf(f, "%.17g,", cell.utility_gap);
    if (std::isfinite(cell.accuracy)) {
      std::fprintf(f, "%.17g,", cell.accuracy);
    } else {
      std::fprintf(f, ",");
    }
    std::fprintf(f, "%.3f\n", cell.wallclock_s);
  }
  std::fflush(f);
}

int CmdTrain(const GlobalFlags& flags) {
  const ExperimentConfig cfg = LoadConfig(flags);
  EnsureOutDir(cfg);
  const LoadedData data = LoadDataset(cfg);
  const LossSpec loss = MakeLossSpec(cfg);
  TrainConfig train = MakeTrainConfig(cfg);
  train.method = cfg.train.method;
  train.epsilon = cfg.train.epsilon;
  train.record_trace = cfg.output.emit_trace;
  train.seed = cfg.train.seeds.empty() ? cfg.dataset.seed
                                       : cfg.train.seeds.front();
  const double lipschitz = ResolveLipschitz(cfg, data, loss);

  TVProfile profile;
  if (train.method == Method::kCorrDp) {
    profile = BuildProfile(cfg, data);
  } else {
    profile = TVProfile::Uniform(data.partition, 1.0);
  }
  const NoiseProfile noise = CalibrateNoise(
      train.method, data.partition, &profile, train.epsilon, cfg.train.delta,
      lipschitz, train.iterations, data.dataset.n(), data.dataset.m(),
      FeatureBound(data.dataset), cfg.train.include_norm_bound);

  RandomState rng(train.seed, "train/method=" + ToString(train.method) +
                                  "/eps=" + std::to_string(train.epsilon));
  FitResult fit = CorrDpSgd(data.dataset, data.partition, loss, train, noise,
                            rng);
  const FitResult reference = ReferenceSolution(data.dataset, loss, 1e-8,
                                                500000, train.param_bound);
  const Eigen::VectorXd full =
      fit.partial ? EmbedColumns(fit.theta, fit.columns, data.dataset.m())
                  : fit.theta;
  fit.utility_gap = UtilityGap(data.dataset, loss, full, reference.theta);
  fit.converged = reference.converged;

  const std::string fit_path =
      (fs::path(cfg.output.directory) / "fit_result.json").string();
  SaveFitResult(fit, train.method, train.epsilon, cfg.train.delta, fit_path);

  CellResult cell;
  cell.method = train.method;
  cell.epsilon = train.epsilon;
  cell.delta = cfg.train.delta;
  cell.seed = train.seed;
  cell.utility_gap = fit.utility_gap;
  if (loss.kind == LossKind::kLogistic) {
    cell.accuracy = ClassificationAccuracy(data.dataset, full);
  }
  cell.wallclock_s = fit.wallclock_s;
  const std::string cells_path =
      (fs::path(cfg.output.directory) / "train_cell.csv").string();
  std::FILE* f = std::fopen(cells_path.c_str(), "a");
  if (f == nullptr) throw ConfigError("cannot append to " + cells_path);
  WriteCellRow(f, cell);
  std::fclose(f);
  std::cout << "utility_gap " << fit.utility_gap << " (wrote " << fit_path
            << ")\n";
  return 0;
}

int CmdExperiment(const GlobalFlags& flags) {
  const ExperimentConfig cfg = LoadConfig(flags);
  EnsureOutDir(cfg);
  if (cfg.train.methods.empty()) {
    throw ConfigError("experiment needs train.methods");
  }
  if (cfg.train.eps_grid.empty()) {
    throw ConfigError("experiment needs train.eps_grid");
  }
  if (cfg.train.seeds.empty()) throw ConfigError("experiment needs train.seeds");
  const LoadedData data = LoadDataset(cfg);
  const LossSpec loss = MakeLossSpec(cfg);

  SuiteOptions options;
  options.methods = cfg.train.methods;
  options.eps_grid = cfg.train.eps_grid;
  options.delta = cfg.train.delta;
  options.seeds = cfg.train.seeds;
  options.base = MakeTrainConfig(cfg);
  options.lipschitz = ResolveLipschitz(cfg, data, loss);
  options.include_norm_bound = cfg.train.include_norm_bound;
  options.jobs = cfg.jobs;

  bool needs_tv = false;
  for (Method method : options.methods) {
    if (method == Method::kCorrDp) needs_tv = true;
  }
  TVProfile profile = needs_tv ? BuildProfile(cfg, data)
                               : TVProfile::Uniform(data.partition, 1.0);

  const std::string cells_path =
      (fs::path(cfg.output.directory) / "cells.csv").string();
  const bool fresh_file =
      !fs::exists(cells_path) || fs::file_size(cells_path) == 0;
  std::FILE* cells_file = std::fopen(cells_path.c_str(), "a");
  if (cells_file == nullptr) {
    throw ConfigError("cannot append to " + cells_path);
  }
  if (fresh_file) {
    std::fprintf(cells_file,
                 "method,epsilon,delta,seed,utility_gap,accuracy,"
                 "wallclock_s\n");
  }
  options.on_cell = [&](const CellResult& cell) {
    WriteCellRow(cells_file, cell);
  };

  RandomState rng(cfg.dataset.seed, "experiment");
  const SuiteResult suite = RunMethodSuite(data.dataset, data.partition, loss,
                                           profile, options, rng);
  std::fclose(cells_file);

  const std::string agg_path =
      (fs::path(cfg.output.directory) / "aggregate.csv").string();
  std::FILE* agg = std::fopen(agg_path.c_str(), "w");
  if (agg == nullptr) throw ConfigError("cannot write " + agg_path);
  std::fprintf(agg,
               "method,epsilon,count,mean_gap,std_gap,mean_accuracy,"
               "std_accuracy\n");
  for (const AggregateResult& a : suite.aggregates) {
    std::fprintf(agg, "%s,%.17g,%d,%.17g,%.17g,", ToString(a.method).c_str(),
                 a.epsilon, a.count, a.mean_gap, a.std_gap);
    if (std::isfinite(a.mean_accuracy)) {
      std::fprintf(agg, "%.17g,%.17g\n", a.mean_accuracy, a.std_accuracy);
    } else {
      std::fprintf(agg, ",\n");
    }
  }
  std::fclose(agg);

  // Data-only plotting stub; keeps graphics out of the core.
  std::ofstream plot(
      (fs::path(cfg.output.directory) / "plot_results.py").string());
  plot << "#!/usr/bin/env python3\n"
          "import csv, collections\n"
          "import matplotlib.pyplot as plt\n"
          "rows = list(csv.DictReader(open('aggregate.csv')))\n"
          "by = collections.defaultdict(list)\n"
          "for r in rows:\n"
          "    by[r['method']].append((float(r['epsilon']),"
          " float(r['mean_gap']), float(r['std_gap'])))\n"
          "for method, pts in sorted(by.items()):\n"
          "    pts.sort()\n"
          "    xs, ys, es = zip(*pts)\n"
          "    plt.errorbar(xs, ys, yerr=es, label=method)\n"
          "plt.xlabel('epsilon'); plt.ylabel('utility gap'); plt.legend()\n"
          "plt.savefig('utility_gap.png', dpi=150)\n";

  std::cout << "wrote " << cells_path << " and " << agg_path << "\n";
  if (!suite.reference_converged) {
    std::cout << "note: reference solver hit its iteration cap\n";
  }
  return 0;
}

int CmdCertify(const GlobalFlags& flags) {
  const ExperimentConfig cfg = LoadConfig(flags);
  EnsureOutDir(cfg);
  const LoadedData data = LoadDataset(cfg);

  TVProfile profile;
  if (!cfg.certify.profile_path.empty()) {
    profile = LoadTvProfile(cfg.certify.profile_path);
    profile.CheckCovers(data.partition);
  } else {
    profile = BuildProfile(cfg, data);
  }
  const double bound = cfg.certify.feature_bound > 0
                           ? cfg.certify.feature_bound
                           : FeatureBound(data.dataset);
  NoiseProfile noise;
  if (!cfg.certify.noise_path.empty()) {
    noise = LoadNoiseProfile(cfg.certify.noise_path);
  } else {
    noise = CalibrateNoise(cfg.certify.method, data.partition, &profile,
                           cfg.certify.epsilon, cfg.certify.delta,
                           cfg.certify.lipschitz, cfg.certify.iterations,
                           data.dataset.n(), data.dataset.m(), bound,
                           cfg.train.include_norm_bound);
  }

  const int m = data.dataset.m();
  Json verdict;
  verdict["method"] = ToString(noise.method);
  verdict["epsilon"] = cfg.certify.epsilon;
  verdict["delta"] = cfg.certify.delta;
  Json scenarios = Json::array();
  bool all_certified = true;

  const NeighborScenario sensitive_change = NeighborScenario::SensitiveChange(
      data.partition, m, cfg.certify.lipschitz, bound, data.dataset.n(),
      cfg.certify.direct_coeff, cfg.certify.cross_coeff);
  const CertificateResult sens =
      MomentBoundCheck(noise, sensitive_change, cfg.certify.iterations,
                       cfg.certify.epsilon, cfg.certify.delta);
  scenarios.push_back(Json{{"scenario", "sensitive_change"},
                           {"certified", sens.certified},
                           {"lambda", sens.lambda_used},
                           {"margin", sens.margin},
                           {"reason", sens.reason}});
  all_certified = all_certified && sens.certified;

  for (int u : data.partition.insensitive) {
    const NeighborScenario change = NeighborScenario::InsensitiveChange(
        data.partition, m, u, profile.values.at(u), cfg.certify.lipschitz,
        bound, data.dataset.n(), cfg.certify.direct_coeff,
        cfg.certify.cross_coeff, cfg.certify.distance_floor);
    const CertificateResult res =
        MomentBoundCheck(noise, change, cfg.certify.iterations,
                         cfg.certify.epsilon, cfg.certify.delta);
    scenarios.push_back(Json{{"scenario", "insensitive_change"},
                             {"feature", u + 1},
                             {"certified", res.certified},
                             {"lambda", res.lambda_used},
                             {"margin", res.margin},
                             {"reason", res.reason}});
    all_certified = all_certified && res.certified;
  }
  verdict["certified"] = all_certified;
  verdict["scenarios"] = scenarios;

  const std::string path =
      (fs::path(cfg.output.directory) / "certificate.json").string();
  std::ofstream out(path);
  out << verdict.dump(2) << "\n";
  std::cout << verdict.dump(2) << "\n";
  // A refusal is a valid verdict, not an error.
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlation-aware differentially private ERM toolkit"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--config", flags.config_path, "INI config file")
      ->expected(1);
  std::uint64_t seed_value = 0;
  auto* seed_opt =
      app.add_option("--seed", seed_value, "override the config seed");
  std::string out_value;
  auto* out_opt = app.add_option("--out", out_value, "override output dir");
  int jobs_value = 0;
  auto* jobs_opt = app.add_option("--jobs", jobs_value, "worker pool size");

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  auto* ingest = app.add_subcommand("ingest", "ingest a CSV dataset");
  auto* estimate = app.add_subcommand("estimate-tv", "estimate a TV profile");
  auto* train = app.add_subcommand("train", "train one configuration");
  auto* experiment =
      app.add_subcommand("experiment", "run the (method, eps, seed) grid");
  auto* certify =
      app.add_subcommand("certify", "verify a noise profile's privacy claim");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (seed_opt->count() > 0) flags.seed = seed_value;
  if (out_opt->count() > 0) flags.out_dir = out_value;
  if (jobs_opt->count() > 0) flags.jobs = jobs_value;

  try {
    if (synth->parsed()) return CmdSynth(flags);
    if (ingest->parsed()) return CmdIngest(flags);
    if (estimate->parsed()) return CmdEstimateTv(flags);
    if (train->parsed()) return CmdTrain(flags);
    if (experiment->parsed()) return CmdExperiment(flags);
    if (certify->parsed()) return CmdCertify(flags);
  } catch (const ConfigError& e) {
    std::cerr << "error[" << e.tag() << "] " << e.what() << "\n";
    return 2;
  } catch (const SpecError& e) {
    std::cerr << "error[" << e.tag() << "] " << e.what() << "\n";
    return 2;
  } catch (const IngestError& e) {
    std::cerr << "error[" << e.tag() << "] " << e.what() << "\n";
    return 2;
  } catch (const ParameterError& e) {
    std::cerr << "error[" << e.tag() << "] " << e.what() << "\n";
    return 2;
  } catch (const ProfileError& e) {
    std::cerr << "error[" << e.tag() << "] " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error[" << e.tag() << "] " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error[Unhandled] " << e.what() << "\n";
    return 3;
  }
  return 2;
}
