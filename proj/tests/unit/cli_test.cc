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

// End-to-end checks of the command-line surface via the built binary
// (path provided in the CORRDP_BIN environment variable).

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "corrdp/corrdp.hpp"
#include "gtest/gtest.h"

namespace corrdp {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const char* bin = std::getenv("CORRDP_BIN");
    ASSERT_NE(bin, nullptr) << "CORRDP_BIN must point at the corrdp binary";
    bin_ = bin;
    dir_ = fs::temp_directory_path() /
           ("corrdp_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  void TearDown() override { fs::remove_all(dir_); }

  std::string WriteConfig(const std::string& name, const std::string& body) {
    const std::string path = (dir_ / name).string();
    std::ofstream out(path);
    out << body;
    return path;
  }

  int Run(const std::string& args) {
    const std::string command =
        bin_ + " " + args + " >" + (dir_ / "stdout.txt").string() + " 2>" +
        (dir_ / "stderr.txt").string();
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string ReadFile(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  }

  std::string Out(const std::string& sub) { return (dir_ / sub).string(); }

  std::string bin_;
  fs::path dir_;
};

constexpr const char* kBaseConfig = R"(
[dataset]
kind = synthetic
m = 8
m_s = 2
n = 300
noise_std = 5.0
seed = 11

[tv]
strategy = exact
delta = 1e-4

[train]
loss = ridge
ridge_lambda = 1.0
method = nonprivate
methods = corrdp,standard
eps_grid = 0.5,1.0
delta = 1e-4
T = 20000
step_rule = constant
alpha = 0.02
lipschitz = 1.0
seeds = 1
)";

TEST_F(CliTest, SynthIsByteDeterministic) {
  const std::string config = WriteConfig("cfg.ini", kBaseConfig);
  ASSERT_EQ(Run("--config " + config + " --out " + Out("a") + " synth"), 0);
  ASSERT_EQ(Run("--config " + config + " --out " + Out("b") + " synth"), 0);
  EXPECT_EQ(ReadFile(Out("a") + "/synthetic.csv"),
            ReadFile(Out("b") + "/synthetic.csv"));
  EXPECT_FALSE(ReadFile(Out("a") + "/synthetic.csv").empty());
}

TEST_F(CliTest, SynthRejectsEmptyDatasets) {
  std::string body = kBaseConfig;
  body.replace(body.find("n = 300"), 7, "n = 0  ");
  const std::string config = WriteConfig("bad_n.ini", body);
  EXPECT_EQ(Run("--config " + config + " --out " + Out("o") + " synth"), 2);
  const std::string err = ReadFile(dir_ / "stderr.txt");
  EXPECT_NE(err.find("error["), std::string::npos) << err;
}

TEST_F(CliTest, UnknownMethodTagFailsValidation) {
  std::string body = kBaseConfig;
  body.replace(body.find("method = nonprivate"), 19, "method = bogus     ");
  const std::string config = WriteConfig("bad_method.ini", body);
  EXPECT_EQ(Run("--config " + config + " --out " + Out("o") + " train"), 2);
}

TEST_F(CliTest, MissingConfigIsAUsageError) {
  EXPECT_EQ(Run("synth"), 2);
}

TEST_F(CliTest, EstimateTvMatchesTheLibraryPath) {
  const std::string config = WriteConfig("cfg.ini", kBaseConfig);
  ASSERT_EQ(
      Run("--config " + config + " --out " + Out("tv") + " estimate-tv"), 0);
  const TVProfile profile = LoadTvProfile(Out("tv") + "/tv_profile.json");
  const GaussianSpec spec = DefaultSyntheticSpec(8, 2);
  const FeaturePartition part = FeaturePartition::LeadingSensitive(8, 2);
  EXPECT_EQ(profile.kind, TvKind::kExact);
  for (int u : part.insensitive) {
    EXPECT_NEAR(profile.values.at(u), TvPosteriorGaussian(spec, part, u, 1e-4),
                1e-12);
  }
}

TEST_F(CliTest, FrozenProfileMissingAFeatureFailsValidation) {
  FeaturePartition part = FeaturePartition::LeadingSensitive(8, 2);
  TVProfile truncated;
  truncated.kind = TvKind::kExact;
  truncated.values[2] = 0.4;  // the other insensitive features are missing
  const std::string profile_path = (dir_ / "frozen.json").string();
  SaveTvProfile(truncated, profile_path);
  std::string body = kBaseConfig;
  body.replace(body.find("strategy = exact"), 16, "strategy = frozen");
  body += "\n[tv]\nprofile = " + profile_path + "\n";
  body.replace(body.find("method = nonprivate"), 19, "method = corrdp    ");
  const std::string config = WriteConfig("frozen.ini", body);
  EXPECT_EQ(Run("--config " + config + " --out " + Out("o") + " train"), 2);
  const std::string err = ReadFile(dir_ / "stderr.txt");
  EXPECT_NE(err.find("ProfileError"), std::string::npos) << err;
}

TEST_F(CliTest, NonPrivateTrainingGapIsTiny) {
  const std::string config = WriteConfig("cfg.ini", kBaseConfig);
  ASSERT_EQ(Run("--config " + config + " --out " + Out("np") + " train"), 0);
  std::ifstream in(Out("np") + "/fit_result.json");
  const nlohmann::json fit = nlohmann::json::parse(in);
  EXPECT_LE(std::abs(fit.at("utility_gap").get<double>()), 1e-3);
}

TEST_F(CliTest, ExperimentWritesAppendOnlyCellsAndAggregates) {
  std::string body = kBaseConfig;
  body.replace(body.find("T = 20000"), 9, "T = 200  ");
  const std::string config = WriteConfig("cfg.ini", body);
  ASSERT_EQ(
      Run("--config " + config + " --out " + Out("exp") + " experiment"), 0);
  const std::string cells_first = ReadFile(Out("exp") + "/cells.csv");
  //4 cells plus header.
  EXPECT_EQ(std::count(cells_first.begin(), cells_first.end(), '\n'), 5);
  EXPECT_NE(cells_first.find("method,epsilon,delta,seed"), std::string::npos);
  // A second run appends rows without rewriting the header.
  ASSERT_EQ(
      Run("--config " + config + " --out " + Out("exp") + " experiment"), 0);
  const std::string cells_second = ReadFile(Out("exp") + "/cells.csv");
  EXPECT_EQ(std::count(cells_second.begin(), cells_second.end(), '\n'), 9);
  EXPECT_EQ(cells_second.find("method,epsilon,delta,seed"),
            cells_second.rfind("method,epsilon,delta,seed"));
  const std::string aggregate = ReadFile(Out("exp") + "/aggregate.csv");
  EXPECT_NE(aggregate.find("corrdp"), std::string::npos);
  EXPECT_NE(aggregate.find("standard"), std::string::npos);
  EXPECT_TRUE(fs::exists(Out("exp") + "/plot_results.py"));
}

TEST_F(CliTest, CertifyEmitsAStructuredVerdict) {
  std::string body = kBaseConfig;
  body += R"(
[certify]
method = corrdp
epsilon = 0.5
delta = 1e-4
lipschitz = 1.0
T = 4000
)";
  const std::string config = WriteConfig("cfg.ini", body);
  ASSERT_EQ(Run("--config " + config + " --out " + Out("cert") + " certify"),
            0);
  std::ifstream in(Out("cert") + "/certificate.json");
  const nlohmann::json verdict = nlohmann::json::parse(in);
  EXPECT_TRUE(verdict.contains("certified"));
  EXPECT_TRUE(verdict.contains("scenarios"));
  EXPECT_EQ(verdict.at("scenarios").size(), 7u);  // 1 sensitive + 6 features
  for (const auto& scenario : verdict.at("scenarios")) {
    EXPECT_TRUE(scenario.contains("margin"));
    EXPECT_TRUE(scenario.contains("lambda"));
  }
}

}  // namespace
}  // namespace corrdp
