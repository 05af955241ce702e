// Copyright 2026 The Shuffle Leakage Authors
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

#ifndef SHUFFLE_LEAKAGE_RNG_H_
#define SHUFFLE_LEAKAGE_RNG_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace shuffle_leakage {

// xoshiro256** generator whose state is derived from a (seed, stream) key
// through SplitMix64. Stream i of a seed is independent of how many other
// streams exist or in what order they are consumed, which is what makes
// Monte Carlo results independent of thread scheduling.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0);

  uint64_t Next();
  // Uniform on [0, 1) with 53 bits of resolution.
  double UniformDouble();
  // Uniform on {0, ..., bound - 1}; bound must be positive.
  uint64_t UniformInt(uint64_t bound);

 private:
  uint64_t state_[4];
};

// Inverse-CDF sampler over indices 0..size-1. Zero-mass indices are never
// returned.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> probs);

  size_t Sample(Rng& rng) const;
  size_t size() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
  size_t last_positive_ = 0;
};

// In-place Fisher-Yates shuffle driven by `rng`.
template <typename T>
void Shuffle(std::vector<T>& values, Rng& rng) {
  for (size_t i = values.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.UniformInt(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace shuffle_leakage

#endif  // SHUFFLE_LEAKAGE_RNG_H_
