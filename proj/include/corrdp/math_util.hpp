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

#ifndef CORRDP_MATH_UTIL_HPP_
#define CORRDP_MATH_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <functional>

namespace corrdp {

inline double NormalCdf(double x) {
  return 0.5 * std::erfc(-x * M_SQRT1_2);
}

inline double NormalPdf(double x, double mean, double stddev) {
  const double z = (x - mean) / stddev;
  return std::exp(-0.5 * z * z) / (stddev * std::sqrt(2.0 * M_PI));
}

inline double Clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

inline double Sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

namespace internal {

inline double SimpsonRule(double a, double b, double fa, double fm,
                          double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double AdaptiveSimpsonStep(const std::function<double(double)>& f,
                                  double a, double b, double fa, double fm,
                                  double fb, double whole, double tol,
                                  int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = SimpsonRule(a, m, fa, flm, fm);
  const double right = SimpsonRule(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return AdaptiveSimpsonStep(f, a, m, fa, flm, fm, left, 0.5 * tol,
                             depth - 1) +
         AdaptiveSimpsonStep(f, m, b, fm, frm, fb, right, 0.5 * tol,
                             depth - 1);
}

}  // namespace internal

// Adaptive Simpson quadrature with absolute-error target `tol`.
inline double IntegrateAdaptive(const std::function<double(double)>& f,
                                double a, double b, double tol = 1e-9,
                                int max_depth = 40) {
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = internal::SimpsonRule(a, b, fa, fm, fb);
  return internal::AdaptiveSimpsonStep(f, a, b, fa, fm, fb, whole, tol,
                                       max_depth);
}

}  // namespace corrdp

#endif  // CORRDP_MATH_UTIL_HPP_
