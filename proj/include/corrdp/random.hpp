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

#ifndef CORRDP_RANDOM_HPP_
#define CORRDP_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace corrdp {

// Deterministic random stream derived from a (master seed, label) pair.
// Streams with distinct labels are independent regardless of how much has
// been consumed from either; sampling itself avoids std::*_distribution so
// that a fixed (seed, label) reproduces the same sequence on any platform
// with the same mt19937_64.  Each stream is single-consumer.
class RandomState {
 public:
  RandomState(std::uint64_t master_seed, const std::string& stream_label)
      : master_seed_(master_seed), stream_label_(stream_label) {
    const std::uint64_t h = Fnv1a(stream_label);
    std::seed_seq seq{
        static_cast<std::uint32_t>(master_seed),
        static_cast<std::uint32_t>(master_seed >> 32),
        static_cast<std::uint32_t>(h),
        static_cast<std::uint32_t>(h >> 32),
    };
    engine_.seed(seq);
  }

  std::uint64_t master_seed() const { return master_seed_; }
  const std::string& stream_label() const { return stream_label_; }

  // New independent stream under the same master seed.
  RandomState Derive(const std::string& suffix) const {
    return RandomState(master_seed_, stream_label_ + "/" + suffix);
  }

  std::uint64_t NextRaw() { return engine_(); }

  // Uniform on [0, 1).
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1), both endpoints excluded.
  double UniformOpen() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) via rejection (unbiased).
  std::uint64_t UniformInt(std::uint64_t bound) {
    const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return draw % bound;
  }

  // Standard normal via Box-Muller; the spare draw is cached.
  double Normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = UniformOpen();
    const double u2 = Uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }

  // Laplace with the given scale (mean absolute deviation equals scale).
  double Laplace(double scale) {
    const double u = UniformOpen() - 0.5;
    return (u < 0 ? scale : -scale) * std::log(1.0 - 2.0 * std::abs(u));
  }

  std::vector<double> NormalVector(int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (double& v : out) v = Normal();
    return out;
  }

  // Sample `k` distinct indices out of [0, n) (partial Fisher-Yates).
  std::vector<int> SampleWithoutReplacement(int n, int k) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
      const std::uint64_t j =
          i + UniformInt(static_cast<std::uint64_t>(n - i));
      std::swap(pool[static_cast<std::size_t>(i)],
                pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    return pool;
  }

 private:
  static std::uint64_t Fnv1a(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
      hash ^= c;
      hash *= 1099511628211ull;
    }
    return hash;
  }

  std::uint64_t master_seed_;
  std::string stream_label_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace corrdp

#endif  // CORRDP_RANDOM_HPP_
