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

#ifndef CORRDP_SERIALIZATION_HPP_
#define CORRDP_SERIALIZATION_HPP_

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "corrdp/dataset.hpp"
#include "corrdp/errors.hpp"
#include "corrdp/optimizer.hpp"
#include "corrdp/tv_estimation.hpp"

namespace corrdp {

using Json = nlohmann::ordered_json;

namespace internal {

inline Json ToJson(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline Eigen::VectorXd VectorFromJson(const Json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    v(static_cast<int>(i)) = arr[i].get<double>();
  }
  return v;
}

inline void WriteFile(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

inline Json ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
}

}  // namespace internal

// A frozen TV profile can be replayed across experiments; indices are stored
// 1-based to match the command-line convention.
inline void SaveTvProfile(const TVProfile& profile, const std::string& path) {
  Json j;
  j["kind"] = ToString(profile.kind);
  j["estimator"] = profile.meta.estimator;
  j["c2"] = profile.meta.c2;
  j["gamma"] = profile.meta.gamma;
  j["delta"] = profile.meta.delta;
  j["n"] = profile.meta.n;
  j["m"] = profile.meta.m;
  j["m_s"] = profile.meta.m_s;
  Json values = Json::array();
  for (const auto& [index, value] : profile.values) {
    values.push_back(Json{{"feature", index + 1}, {"tv", value}});
  }
  j["values"] = values;
  internal::WriteFile(path, j);
}

inline TVProfile LoadTvProfile(const std::string& path) {
  const Json j = internal::ReadFile(path);
  TVProfile profile;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "exact") profile.kind = TvKind::kExact;
  else if (kind == "empirical") profile.kind = TvKind::kEmpirical;
  else if (kind == "confidence_adjusted") profile.kind = TvKind::kConfidenceAdjusted;
  else throw ConfigError("unknown TV profile kind '" + kind + "'");
  profile.meta.estimator = j.value("estimator", std::string("unknown"));
  profile.meta.c2 = j.value("c2", 1.0);
  profile.meta.gamma = j.value("gamma", 0.5);
  profile.meta.delta = j.value("delta", 0.0);
  profile.meta.n = j.value("n", 0);
  profile.meta.m = j.value("m", 0);
  profile.meta.m_s = j.value("m_s", 0);
  for (const Json& entry : j.at("values")) {
    const int feature = entry.at("feature").get<int>() - 1;
    profile.values[feature] = entry.at("tv").get<double>();
  }
  return profile;
}

inline void SaveNoiseProfile(const NoiseProfile& profile,
                             const std::string& path) {
  Json j;
  j["method"] = ToString(profile.method);
  j["epsilon"] = profile.epsilon;
  j["delta"] = profile.delta;
  j["lipschitz"] = profile.lipschitz;
  j["feature_bound"] = profile.feature_bound;
  j["iterations"] = profile.iterations;
  j["n"] = profile.n;
  j["m_s"] = profile.m_s;
  j["sigma_sq"] = internal::ToJson(profile.sigma_sq);
  internal::WriteFile(path, j);
}

inline NoiseProfile LoadNoiseProfile(const std::string& path) {
  const Json j = internal::ReadFile(path);
  NoiseProfile profile;
  profile.method = MethodFromString(j.at("method").get<std::string>());
  profile.epsilon = j.at("epsilon").get<double>();
  profile.delta = j.at("delta").get<double>();
  profile.lipschitz = j.value("lipschitz", 0.0);
  profile.feature_bound = j.value("feature_bound", 0.0);
  profile.iterations = j.value("iterations", 0);
  profile.n = j.value("n", 0);
  profile.m_s = j.value("m_s", 0);
  profile.sigma_sq = internal::VectorFromJson(j.at("sigma_sq"));
  return profile;
}

// Sidecar describing how a synthetic dataset file was produced.
inline void SaveDatasetMeta(const GaussianSpec& spec,
                            const FeaturePartition& part, int n,
                            std::uint64_t seed, const std::string& path) {
  Json j;
  j["n"] = n;
  j["m"] = spec.m();
  j["m_s"] = part.num_sensitive();
  j["seed"] = seed;
  j["noise_std"] = spec.noise_std;
  j["mean"] = internal::ToJson(spec.mean);
  j["theta_true"] = internal::ToJson(spec.theta_true);
  Json cov = Json::array();
  for (int i = 0; i < spec.m(); ++i) {
    cov.push_back(internal::ToJson(spec.covariance.row(i)));
  }
  j["covariance"] = cov;
  internal::WriteFile(path, j);
}

inline void SaveFitResult(const FitResult& fit, Method method, double epsilon,
                          double delta, const std::string& path) {
  Json j;
  j["method"] = ToString(method);
  j["epsilon"] = epsilon;
  j["delta"] = delta;
  j["utility_gap"] = fit.utility_gap;
  j["wallclock_s"] = fit.wallclock_s;
  j["converged"] = fit.converged;
  j["partial"] = fit.partial;
  j["theta"] = internal::ToJson(fit.theta);
  if (!fit.trace.empty()) j["trace"] = fit.trace;
  internal::WriteFile(path, j);
}

}  // namespace corrdp

#endif  // CORRDP_SERIALIZATION_HPP_
