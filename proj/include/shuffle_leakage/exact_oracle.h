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

// Exact mutual information by exhaustive enumeration at small scale, plus
// the finite-n binomial-sum expressions for the basic shuffle-only setting.
//
// Enumeration works on histograms wherever the quantity depends on the
// shuffled output only through its symbol counts; position-level oracles
// for heterogeneous users enumerate permutations. Every enumeration is
// guarded by ExactConfig::max_states and fails with kResourceExhausted
// rather than truncating.

#ifndef SHUFFLE_LEAKAGE_EXACT_ORACLE_H_
#define SHUFFLE_LEAKAGE_EXACT_ORACLE_H_

#include <cstdint>
#include <functional>
#include <span>

#include "absl/status/statusor.h"
#include "shuffle_leakage/mechanisms.h"
#include "shuffle_leakage/probability.h"

namespace shuffle_leakage {

struct ExactConfig {
  // Upper bound on enumerated states (histograms times symbols, or output
  // sequences times permutations).
  double max_states = 1e7;
};

// Number of ways to write `total` as an ordered sum of `parts` nonnegative
// integers, as a double so large counts do not overflow.
double CountCompositions(int64_t total, int64_t parts);

// Calls `fn` with every composition of `total` into `parts` nonnegative
// parts, in lexicographically decreasing order of the first part.
void ForEachComposition(int64_t total, int64_t parts,
                        const std::function<void(std::span<const int64_t>)>& fn);

// log of the Multinomial(sum(counts); probs) mass at `counts`. Returns -inf
// when a positive count falls on a zero-probability symbol.
double LogMultinomialPmf(std::span<const int64_t> counts,
                         std::span<const double> probs);

// I(K; Z) in the basic configuration (target ~ P, others i.i.d. ~ Q), as the
// expectation of KL(Law(K | Z) || U_n) over all (target value, histogram of
// the other n - 1 draws) outcomes.
absl::StatusOr<double> ExactIKZ(const Categorical& p, const Categorical& q,
                                int n, const ExactConfig& config = {});

// I(Y_1; Z) in the basic configuration, from the joint law of (Y_1, histogram
// of Z) computed with multinomial masses. Valid with or without P << Q.
absl::StatusOr<double> ExactIY1Z(const Categorical& p, const Categorical& q,
                                 int n, const ExactConfig& config = {});

// I(Y_1; Z) for P = Q as sum_i E_{X~Bin(n,p_i)}[(X/n) log(X/n)] - p_i log p_i.
absl::StatusOr<double> ClosedFormIY1PeqQ(const Categorical& p, int n);

// H(Y_1) - I(K; Y_1, Z) for P << Q, as
// sum_i (p_i/q_i) E_{X~Bin(n,q_i)}[(X/n) log(X/n)] - p_i log p_i.
absl::StatusOr<double> ClosedFormValueChannel(const Categorical& p,
                                              const Categorical& q, int n);

// I(X_1; Z) where X_1 ~ prior, the target reports R_{X_1}, and user i >= 2
// reports an independent draw from others[i - 2]. Computed over output
// histograms by dynamic programming over the other users.
absl::StatusOr<double> ExactInputLeakage(const Categorical& prior,
                                         const Randomizer& r,
                                         std::span<const Categorical> others,
                                         const ExactConfig& config = {});

// I(X_1; Z | X_{-1} = x_rest) in the shuffle-DP setting.
absl::StatusOr<double> ExactIX1GivenXrest(const Randomizer& r,
                                          const Categorical& prior,
                                          std::span<const Label> x_rest,
                                          const ExactConfig& config = {});

// I(X_1; Z) when all n inputs are i.i.d. ~ prior.
absl::StatusOr<double> ExactIX1Iid(const Randomizer& r,
                                   const Categorical& prior, int n,
                                   const ExactConfig& config = {});

// I(X_1; Z^r) for the blanket-mixed output: the target reports R_{X_1} and
// the other n - 1 users report i.i.d. draws from R's generalized blanket.
absl::StatusOr<double> ExactIX1BlanketMix(const Randomizer& r,
                                          const Categorical& prior, int n,
                                          const ExactConfig& config = {});

struct PositionLeakage {
  // I(K; Z | X = x).
  double mutual_information = 0.0;
  // max over z, k, k' of log Pr[z | K=k, x] / Pr[z | K=k', x]; +inf when some
  // z is possible for one position and impossible for another.
  double max_log_ratio = 0.0;
};

// Position leakage in the shuffle-DP setting with all inputs fixed, from the
// conditional laws Pr[Z = z | K = k, X = x] obtained by summing over every
// permutation that places the target's report at position k.
absl::StatusOr<PositionLeakage> ExactPositionLeakageDp(
    const Randomizer& r, std::span<const Label> x_inputs,
    const ExactConfig& config = {});

// Shorthand for ExactPositionLeakageDp(...).mutual_information.
absl::StatusOr<double> ExactIKZDp(const Randomizer& r,
                                  std::span<const Label> x_inputs,
                                  const ExactConfig& config = {});

}  // namespace shuffle_leakage

#endif  // SHUFFLE_LEAKAGE_EXACT_ORACLE_H_
