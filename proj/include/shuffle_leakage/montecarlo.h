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

// Seeded Monte Carlo estimators of the shuffle-model mutual informations.
//
// Sample i draws its randomness from Rng(seed, i), per-sample statistics are
// stored by index, and the reduction runs in index order, so results are
// bit-identical for any worker count.

#ifndef SHUFFLE_LEAKAGE_MONTECARLO_H_
#define SHUFFLE_LEAKAGE_MONTECARLO_H_

#include <cstdint>
#include <functional>

#include "absl/status/statusor.h"
#include "shuffle_leakage/mechanisms.h"
#include "shuffle_leakage/probability.h"
#include "shuffle_leakage/rng.h"

namespace shuffle_leakage {

inline constexpr int64_t kDefaultSamples = 100000;

struct McOptions {
  int64_t samples = kDefaultSamples;
  uint64_t seed = 1;
  // Worker threads; 0 picks the hardware concurrency.
  int workers = 0;
};

struct EstimatorResult {
  double estimate = 0.0;        // nats
  double standard_error = 0.0;  // plug-in sample std / sqrt(samples)
  int64_t samples = 0;
  uint64_t seed = 0;
};

// Mean and standard error of statistic(i, rng_i) over i = 0..samples-1.
absl::StatusOr<EstimatorResult> EstimateMean(
    const std::function<double(Rng&)>& statistic, const McOptions& options);

// I(K; Z) in the basic configuration: mean of KL(Law(K | Z) || U_n).
absl::StatusOr<EstimatorResult> McIKZ(const Categorical& p,
                                      const Categorical& q, int n,
                                      const McOptions& options = {});

// I(Y_1; Z) in the basic configuration: mean of KL(Law(Y_1 | Z) || P).
absl::StatusOr<EstimatorResult> McIY1Z(const Categorical& p,
                                       const Categorical& q, int n,
                                       const McOptions& options = {});

// I(X_1; Z) in the shuffle-DP setting with n i.i.d. inputs ~ prior: the
// other users' reports are i.i.d. from Q = prior-mixture of R's rows and the
// statistic is KL(Law(X_1 | histogram) || prior).
absl::StatusOr<EstimatorResult> McIX1ZIid(const Randomizer& r,
                                          const Categorical& prior, int n,
                                          const McOptions& options = {});

}  // namespace shuffle_leakage

#endif  // SHUFFLE_LEAKAGE_MONTECARLO_H_
