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

#ifndef CORRDP_DISTRIBUTION_HPP_
#define CORRDP_DISTRIBUTION_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "corrdp/errors.hpp"
#include "corrdp/math_util.hpp"

namespace corrdp {

// One-dimensional distribution in one of three concrete forms.  Probability
// vectors must be nonnegative and sum to 1 within 1e-9; Gaussian variance
// must be positive.
class Distribution1D {
 public:
  enum class Family { kGaussian, kCategorical, kHistogram };

  static Distribution1D Gaussian(double mean, double variance) {
    if (!(variance > 0) || !std::isfinite(variance) || !std::isfinite(mean)) {
      throw DistributionError("Gaussian requires finite mean and variance > 0");
    }
    Distribution1D d;
    d.family_ = Family::kGaussian;
    d.mean_ = mean;
    d.variance_ = variance;
    return d;
  }

  static Distribution1D Categorical(std::vector<double> probabilities) {
    CheckMass(probabilities, "categorical probabilities");
    Distribution1D d;
    d.family_ = Family::kCategorical;
    d.probabilities_ = std::move(probabilities);
    return d;
  }

  static Distribution1D Bernoulli(double p) {
    return Categorical({1.0 - p, p});
  }

  // `edges` has one more entry than `masses` and must be strictly increasing.
  static Distribution1D Histogram(std::vector<double> edges,
                                  std::vector<double> masses) {
    if (edges.size() != masses.size() + 1 || masses.empty()) {
      throw DistributionError("histogram needs k masses and k+1 edges");
    }
    if (!std::is_sorted(edges.begin(), edges.end()) ||
        std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
      throw DistributionError("histogram edges must be strictly increasing");
    }
    CheckMass(masses, "histogram masses");
    Distribution1D d;
    d.family_ = Family::kHistogram;
    d.edges_ = std::move(edges);
    d.masses_ = std::move(masses);
    return d;
  }

  Family family() const { return family_; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }
  const std::vector<double>& probabilities() const { return probabilities_; }
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& masses() const { return masses_; }

  bool IsContinuous() const { return family_ != Family::kCategorical; }

  // Density at x (continuous families only).
  double Density(double x) const {
    if (family_ == Family::kGaussian) {
      return NormalPdf(x, mean_, std::sqrt(variance_));
    }
    if (family_ == Family::kHistogram) {
      if (x < edges_.front() || x >= edges_.back()) return 0.0;
      const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
      const std::size_t bin = static_cast<std::size_t>(it - edges_.begin()) - 1;
      return masses_[bin] / (edges_[bin + 1] - edges_[bin]);
    }
    throw DistributionError("categorical distributions have no density");
  }

  // Interval on which essentially all mass lives (continuous families).
  std::pair<double, double> Support() const {
    if (family_ == Family::kGaussian) {
      const double s = std::sqrt(variance_);
      return {mean_ - 12.0 * s, mean_ + 12.0 * s};
    }
    return {edges_.front(), edges_.back()};
  }

 private:
  static void CheckMass(const std::vector<double>& mass,
                        const std::string& what) {
    if (mass.empty()) throw DistributionError(what + " must be nonempty");
    double sum = 0;
    for (double p : mass) {
      if (!(p >= 0) || !std::isfinite(p)) {
        throw DistributionError(what + " must be nonnegative");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw DistributionError(what + " must sum to 1 (got " +
                              std::to_string(sum) + ")");
    }
  }

  Family family_ = Family::kGaussian;
  double mean_ = 0;
  double variance_ = 1;
  std::vector<double> probabilities_;
  std::vector<double> edges_;
  std::vector<double> masses_;
};

namespace internal {

// Exact L1 distance between two piecewise-constant densities.
inline double HistogramTv(const Distribution1D& p, const Distribution1D& q) {
  std::vector<double> cuts;
  cuts.insert(cuts.end(), p.edges().begin(), p.edges().end());
  cuts.insert(cuts.end(), q.edges().begin(), q.edges().end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double l1 = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const double pd =
        (mid >= p.edges().front() && mid < p.edges().back()) ? p.Density(mid)
                                                             : 0.0;
    const double qd =
        (mid >= q.edges().front() && mid < q.edges().back()) ? q.Density(mid)
                                                             : 0.0;
    l1 += std::abs(pd - qd) * (cuts[i + 1] - cuts[i]);
  }
  return 0.5 * l1;
}

}  // namespace internal

// Total variation distance sup_A |P(A) - Q(A)| between two distributions of
// the same continuity class.  Categorical pairs use the half-L1 formula;
// equal-variance Gaussian pairs the closed form 2*Phi(|dmu|/(2 sigma)) - 1;
// any other continuous pair is integrated adaptively to absolute error 1e-8.
inline double TvExact(const Distribution1D& p, const Distribution1D& q) {
  using Family = Distribution1D::Family;
  if (p.family() == Family::kCategorical || q.family() == Family::kCategorical) {
    if (p.family() != q.family()) {
      throw DistributionError(
          "cannot compare categorical and continuous distributions");
    }
    if (p.probabilities().size() != q.probabilities().size()) {
      throw DistributionError("categorical supports differ in size");
    }
    double sum = 0;
    for (std::size_t i = 0; i < p.probabilities().size(); ++i) {
      sum += std::abs(p.probabilities()[i] - q.probabilities()[i]);
    }
    return Clamp01(0.5 * sum);
  }

  if (p.family() == Family::kGaussian && q.family() == Family::kGaussian) {
    const double rel = std::abs(p.variance() - q.variance()) /
                       std::max(p.variance(), q.variance());
    if (rel <= 1e-12) {
      const double sigma = std::sqrt(p.variance());
      return Clamp01(2.0 * NormalCdf(std::abs(p.mean() - q.mean()) /
                                     (2.0 * sigma)) -
                     1.0);
    }
  }
  if (p.family() == Family::kHistogram && q.family() == Family::kHistogram) {
    return Clamp01(internal::HistogramTv(p, q));
  }

  const auto [plo, phi] = p.Support();
  const auto [qlo, qhi] = q.Support();
  const double lo = std::min(plo, qlo);
  const double hi = std::max(phi, qhi);
  const double integral = IntegrateAdaptive(
      [&](double x) { return std::abs(p.Density(x) - q.Density(x)); }, lo, hi,
      1e-9);
  return Clamp01(0.5 * integral);
}

}  // namespace corrdp

#endif  // CORRDP_DISTRIBUTION_HPP_
