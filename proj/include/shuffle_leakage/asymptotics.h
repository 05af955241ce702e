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

// Closed-form leading terms and bounds for shuffle-model leakage.
//
// Expansions are returned as coefficients so callers can inspect each term;
// the O(n^-3/2) remainders depend on the distributions involved and are
// never estimated here.

#ifndef SHUFFLE_LEAKAGE_ASYMPTOTICS_H_
#define SHUFFLE_LEAKAGE_ASYMPTOTICS_H_

#include <string>

#include "absl/status/statusor.h"
#include "shuffle_leakage/mechanisms.h"
#include "shuffle_leakage/probability.h"

namespace shuffle_leakage {

// constant + log_n_coefficient * log(n) + inv_n_coefficient / n.
struct AsymptoticTerm {
  double constant_term = 0.0;
  double log_n_coefficient = 0.0;
  double inv_n_coefficient = 0.0;
  std::string remainder_order = "n^-3/2";

  double Evaluate(double n) const;
};

// (m - 1) / (2n): I(Y_1; Z) for P = Q with support size m.
absl::StatusOr<double> AsymIY1PeqQ(int m, int n);

// I(K; Z) ~ beta log n + (1 - beta) KL(P'||Q) - (1 - beta) chi2(P'||Q) / (2n),
// with beta the P-mass outside support(Q) and P' the restriction of P to the
// rest. For P << Q this is KL(P||Q) - chi2(P||Q) / (2n).
absl::StatusOr<AsymptoticTerm> AsymIK(const Categorical& p,
                                      const Categorical& q);

// I(Y_1; Z) ~ sum_{P(y)>0=Q(y)} P(y) log(1/P(y)) + (1 - beta) log(1/(1 - beta))
//             + (1 - beta) sum_i (p'_i - p'^2_i) / q_i / (2n).
// The 1/n sum runs over support(P').
absl::StatusOr<AsymptoticTerm> AsymIY1(const Categorical& p,
                                       const Categorical& q);

// sum over support(P) of p_i (1 - p_i) / q_i: twice the 1/n coefficient of
// I(Y_1; Z) for P << Q.
absl::StatusOr<double> MessageLeakageConstant(const Categorical& p,
                                              const Categorical& q);

// The Q minimizing the leading I(Y_1; Z) term for fixed P: q_i proportional
// to sqrt(p_i (1 - p_i)) on support(P), zero elsewhere. Needs at least two
// support points.
absl::StatusOr<Categorical> OptimalQ(const Categorical& p);

// (sum_i sqrt(p_i (1 - p_i)))^2, the leading constant achieved by OptimalQ.
double OptimalQConstant(const Categorical& p);

// I(K; Z) <= 2 eps0 under an eps0-LDP randomizer.
absl::StatusOr<double> BoundIKDp(double eps0);

// I(X_1; Z | X_{-1}) <= (e^eps0 - 1) / (2n) to leading order.
absl::StatusOr<double> BoundIXDp(double eps0, int n);

// E_{x~prior}[chi2(R_x || Q)]. Q may carry labels outside R's outputs (for
// example the blanket placeholder); it must be positive wherever some row
// with positive prior is.
absl::StatusOr<double> MeanRowChi2(const Categorical& prior,
                                   const Randomizer& r, const Categorical& q);

// Leading term of I(X_1; C) for one report of X_1 ~ prior mixed with s
// i.i.d. Q-reports: (mean row chi2 - chi2(Pbar || Q)) / (2(s + 1)), with
// Pbar the prior-mixture of R's rows.
absl::StatusOr<double> LemmaRate(const Categorical& prior, const Randomizer& r,
                                 const Categorical& q, int s);

// mean row chi2 against R's generalized blanket, over 2n: the
// blanket-decomposition upper bound on I(X_1; Z | X_{-1}).
absl::StatusOr<double> BlanketBoundIX(const Categorical& prior,
                                      const Randomizer& r, int n);

// (m - 1) e^eps0 / (2n): message leakage bound from the clone decomposition.
absl::StatusOr<double> CloneBoundIY1(int m, double eps0, int n);

}  // namespace shuffle_leakage

#endif  // SHUFFLE_LEAKAGE_ASYMPTOTICS_H_
