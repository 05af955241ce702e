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

#include "shuffle_leakage/rng.h"

#include <cassert>

#include "shuffle_leakage/numeric.h"

namespace shuffle_leakage {
namespace {

uint64_t SplitMix64(uint64_t& x) {
  uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

uint64_t Rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(uint64_t seed, uint64_t stream) {
  uint64_t a = seed;
  uint64_t b = stream ^ 0xD1B54A32D192ED03ULL;
  uint64_t key = SplitMix64(a) ^ Rotl(SplitMix64(b), 17);
  for (uint64_t& s : state_) s = SplitMix64(key);
}

uint64_t Rng::Next() {
  const uint64_t result = Rotl(state_[1] * 5, 7) * 9;
  const uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = Rotl(state_[3], 45);
  return result;
}

double Rng::UniformDouble() {
  return static_cast<double>(Next() >> 11) * 0x1.0p-53;
}

uint64_t Rng::UniformInt(uint64_t bound) {
  assert(bound > 0);
  // Lemire's nearly divisionless rejection method.
  unsigned __int128 m = static_cast<unsigned __int128>(Next()) * bound;
  uint64_t low = static_cast<uint64_t>(m);
  if (low < bound) {
    const uint64_t threshold = -bound % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(Next()) * bound;
      low = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

DiscreteSampler::DiscreteSampler(std::span<const double> probs) {
  cdf_.reserve(probs.size());
  CompensatedSum running;
  for (size_t i = 0; i < probs.size(); ++i) {
    running.Add(probs[i]);
    cdf_.push_back(running.Total());
    if (probs[i] > 0.0) last_positive_ = i;
  }
}

size_t DiscreteSampler::Sample(Rng& rng) const {
  const double u = rng.UniformDouble() * cdf_.back();
  for (size_t i = 0; i < last_positive_; ++i) {
    if (u < cdf_[i]) return i;
  }
  return last_positive_;
}

}  // namespace shuffle_leakage
