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

#ifndef CORRDP_ERRORS_HPP_
#define CORRDP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace corrdp {

// Base class for all library errors. `tag()` is stable and machine-parsable;
// the what() string carries human detail.
class Error : public std::runtime_error {
 public:
  Error(std::string tag, const std::string& message)
      : std::runtime_error(message), tag_(std::move(tag)) {}
  const std::string& tag() const { return tag_; }

 private:
  std::string tag_;
};

#define CORRDP_DEFINE_ERROR(NAME)                            \
  class NAME : public Error {                                \
   public:                                                   \
    explicit NAME(const std::string& message)                \
        : Error(#NAME, message) {}                           \
  }

// Invalid generator or distribution specification (bad covariance, ...).
CORRDP_DEFINE_ERROR(SpecError);
// CSV ingestion failures; messages carry row/column locations.
CORRDP_DEFINE_ERROR(IngestError);
// Out-of-range scalar parameters (epsilon <= 0, gamma outside (0, 1/2], ...).
CORRDP_DEFINE_ERROR(ParameterError);
// Distribution pairs that cannot be compared.
CORRDP_DEFINE_ERROR(DistributionError);
// A conditioning category with no usable samples.
CORRDP_DEFINE_ERROR(ConditioningUnsupported);
// An estimator applied to a feature layout it does not support.
CORRDP_DEFINE_ERROR(EstimatorMismatch);
// Degenerate estimator inputs (zero conditioning variance, ...).
CORRDP_DEFINE_ERROR(EstimatorError);
// TV profile missing entries or inconsistent with the feature partition.
CORRDP_DEFINE_ERROR(ProfileError);
// Vector dimension mismatches.
CORRDP_DEFINE_ERROR(ShapeError);
// A loss-smoothness domain assumption does not hold.
CORRDP_DEFINE_ERROR(AssumptionError);
// Non-finite objective during optimization; message names the iteration.
CORRDP_DEFINE_ERROR(DivergenceError);
// Renyi divergence undefined for the requested order.
CORRDP_DEFINE_ERROR(DivergenceUndefined);
// Configuration file problems.
CORRDP_DEFINE_ERROR(ConfigError);

#undef CORRDP_DEFINE_ERROR

}  // namespace corrdp

#endif  // CORRDP_ERRORS_HPP_
