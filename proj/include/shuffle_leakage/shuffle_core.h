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

// Sampling of the shuffle-only and shuffle-DP channels and the exact
// posteriors an observer of the shuffled output can form.
//
// Positions are 1-indexed: position k of z is z[k - 1].

#ifndef SHUFFLE_LEAKAGE_SHUFFLE_CORE_H_
#define SHUFFLE_LEAKAGE_SHUFFLE_CORE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "shuffle_leakage/mechanisms.h"
#include "shuffle_leakage/probability.h"
#include "shuffle_leakage/rng.h"

namespace shuffle_leakage {

struct ShuffleSample {
  std::vector<Label> z;
  // Position of the target user's message, in [1, n].
  int k_true = 1;
  Label y1;
  // Per-user inputs, set for shuffle-DP samples only.
  std::optional<std::vector<Label>> x_inputs;
};

struct Histogram {
  std::map<Label, int64_t> counts;
  int64_t total = 0;

  static Histogram FromMessages(std::span<const Label> messages);
  int64_t Count(const Label& label) const;
};

// Target message ~ P, the other n - 1 messages i.i.d. ~ Q, then a uniform
// random permutation.
absl::StatusOr<ShuffleSample> SampleShuffleOnly(const Categorical& p,
                                                const Categorical& q, int n,
                                                Rng& rng);

// Each user i reports a draw from R_{x_i}; the reports are shuffled.
absl::StatusOr<ShuffleSample> SampleShuffleDp(const Randomizer& r,
                                              std::span<const Label> x_inputs,
                                              Rng& rng);

// Pr[K = k | Z = z] for k = 1..n, proportional to P(z_k) / Q(z_k). Positions
// holding a symbol with Q = 0 < P have infinite ratio; when any exist the
// posterior is uniform over them.
absl::StatusOr<std::vector<double>> PosteriorK(std::span<const Label> z,
                                               const Categorical& p,
                                               const Categorical& q);

// Pr[Y_1 = y | Z = z] over the distinct values of z (first-appearance order).
absl::StatusOr<Categorical> PosteriorY1(std::span<const Label> z,
                                        const Categorical& p,
                                        const Categorical& q);

// Pr[X_1 = x | C = c] proportional to prior(x) * sum_y c_y R_x(y) / Q(y),
// where c is the histogram of the target's report mixed with i.i.d.
// Q-samples. Returned over the randomizer's inputs.
absl::StatusOr<Categorical> PosteriorX1Fact1(const Histogram& c,
                                             const Categorical& prior,
                                             const Randomizer& r,
                                             const Categorical& q);

// Count-level forms of the posteriors above, shared by the exact oracles and
// the Monte Carlo estimators. `p` and `q` are aligned over a common
// alphabet and `counts` is the symbol histogram of z over that alphabet.

// P(y) / Q(y) per symbol; +inf where Q(y) = 0 < P(y), 0 where P(y) = 0.
std::vector<double> LikelihoodRatios(std::span<const double> p,
                                     std::span<const double> q);

// KL(Law(K | Z) || U_n) for a z with the given symbol counts.
double PositionPosteriorDivergence(std::span<const int64_t> counts,
                                   std::span<const double> ratios);

// KL(Law(Y_1 | Z) || P) for a z with the given symbol counts.
double MessagePosteriorDivergence(std::span<const int64_t> counts,
                                  std::span<const double> ratios,
                                  std::span<const double> p);

}  // namespace shuffle_leakage

#endif  // SHUFFLE_LEAKAGE_SHUFFLE_CORE_H_
