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

#include "shuffle_leakage/asymptotics.h"

#include <cmath>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "shuffle_leakage/numeric.h"

namespace shuffle_leakage {

double AsymptoticTerm::Evaluate(double n) const {
  return constant_term + log_n_coefficient * std::log(n) +
         inv_n_coefficient / n;
}

namespace {

absl::Status CheckUsers(int n) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of users must be >= 1, got ", n));
  }
  return absl::OkStatus();
}

absl::Status CheckEpsilon(double eps0) {
  if (std::isnan(eps0) || eps0 < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps0 must be >= 0, got ", eps0));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> AsymIY1PeqQ(int m, int n) {
  if (m < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("support size must be >= 1, got ", m));
  }
  if (absl::Status s = CheckUsers(n); !s.ok()) return s;
  return static_cast<double>(m - 1) / (2.0 * n);
}

absl::StatusOr<AsymptoticTerm> AsymIK(const Categorical& p,
                                      const Categorical& q) {
  const SupportSplit split = SplitSupport(p, q);
  AsymptoticTerm term;
  term.log_n_coefficient = split.beta;
  if (!split.restricted) return term;
  absl::StatusOr<double> kl = KlDivergence(*split.restricted, q);
  if (!kl.ok()) return kl.status();
  absl::StatusOr<double> chi2 = Chi2Divergence(*split.restricted, q);
  if (!chi2.ok()) return chi2.status();
  term.constant_term = (1.0 - split.beta) * *kl;
  term.inv_n_coefficient = -(1.0 - split.beta) * *chi2 / 2.0;
  return term;
}

absl::StatusOr<double> MessageLeakageConstant(const Categorical& p,
                                              const Categorical& q) {
  CompensatedSum sum;
  for (size_t i = 0; i < p.size(); ++i) {
    const double pi = p.probs()[i];
    if (pi <= 0.0) continue;
    const double qi = q.Prob(p.labels()[i]);
    if (qi <= 0.0) {
      return absl::FailedPreconditionError(absl::StrCat(
          "absolute continuity violated: P has mass on '", p.labels()[i],
          "' where Q has none"));
    }
    sum.Add(pi * (1.0 - pi) / qi);
  }
  return sum.Total();
}

absl::StatusOr<AsymptoticTerm> AsymIY1(const Categorical& p,
                                       const Categorical& q) {
  const SupportSplit split = SplitSupport(p, q);
  AsymptoticTerm term;
  CompensatedSum constant;
  for (size_t i = 0; i < p.size(); ++i) {
    const double pi = p.probs()[i];
    if (pi > 0.0 && q.Prob(p.labels()[i]) <= 0.0) constant.Add(-XLogX(pi));
  }
  constant.Add(-XLogX(1.0 - split.beta));
  term.constant_term = constant.Total();
  if (!split.restricted) return term;
  absl::StatusOr<double> c = MessageLeakageConstant(*split.restricted, q);
  if (!c.ok()) return c.status();
  term.inv_n_coefficient = (1.0 - split.beta) * *c / 2.0;
  return term;
}

absl::StatusOr<Categorical> OptimalQ(const Categorical& p) {
  std::vector<double> root(p.size(), 0.0);
  CompensatedSum total;
  for (size_t i = 0; i < p.size(); ++i) {
    const double pi = p.probs()[i];
    if (pi > 0.0) root[i] = std::sqrt(pi * (1.0 - pi));
    total.Add(root[i]);
  }
  if (!(total.Total() > 0.0)) {
    return absl::InvalidArgumentError(
        "optimal Q needs P with at least two support points");
  }
  for (double& v : root) v /= total.Total();
  return Categorical::Create(p.labels(), std::move(root));
}

double OptimalQConstant(const Categorical& p) {
  CompensatedSum total;
  for (double pi : p.probs()) {
    if (pi > 0.0) total.Add(std::sqrt(pi * (1.0 - pi)));
  }
  return total.Total() * total.Total();
}

absl::StatusOr<double> BoundIKDp(double eps0) {
  if (absl::Status s = CheckEpsilon(eps0); !s.ok()) return s;
  return 2.0 * eps0;
}

absl::StatusOr<double> BoundIXDp(double eps0, int n) {
  if (absl::Status s = CheckEpsilon(eps0); !s.ok()) return s;
  if (absl::Status s = CheckUsers(n); !s.ok()) return s;
  return std::expm1(eps0) / (2.0 * n);
}

absl::StatusOr<double> MeanRowChi2(const Categorical& prior,
                                   const Randomizer& r, const Categorical& q) {
  absl::StatusOr<std::vector<double>> weights =
      ProjectOnto(prior, r.input_labels());
  if (!weights.ok()) return weights.status();
  CompensatedSum sum;
  for (size_t x = 0; x < r.num_inputs(); ++x) {
    if ((*weights)[x] <= 0.0) continue;
    absl::StatusOr<double> chi2 = Chi2Divergence(r.Row(x), q);
    if (!chi2.ok()) return chi2.status();
    sum.Add((*weights)[x] * *chi2);
  }
  return sum.Total();
}

absl::StatusOr<double> LemmaRate(const Categorical& prior, const Randomizer& r,
                                 const Categorical& q, int s) {
  if (s < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of mixed-in reports must be >= 0, got ", s));
  }
  absl::StatusOr<double> mean_chi2 = MeanRowChi2(prior, r, q);
  if (!mean_chi2.ok()) return mean_chi2.status();
  absl::StatusOr<Categorical> mixture = OutputMarginal(r, prior);
  if (!mixture.ok()) return mixture.status();
  absl::StatusOr<double> mixture_chi2 = Chi2Divergence(*mixture, q);
  if (!mixture_chi2.ok()) return mixture_chi2.status();
  return (*mean_chi2 - *mixture_chi2) / (2.0 * (s + 1));
}

absl::StatusOr<double> BlanketBoundIX(const Categorical& prior,
                                      const Randomizer& r, int n) {
  if (absl::Status s = CheckUsers(n); !s.ok()) return s;
  absl::StatusOr<BlanketDecomposition> blanket = BlanketOfRandomizer(r);
  if (!blanket.ok()) return blanket.status();
  absl::StatusOr<double> mean_chi2 =
      MeanRowChi2(prior, r, blanket->generalized_blanket);
  if (!mean_chi2.ok()) return mean_chi2.status();
  return *mean_chi2 / (2.0 * n);
}

absl::StatusOr<double> CloneBoundIY1(int m, double eps0, int n) {
  if (m < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("alphabet size must be >= 1, got ", m));
  }
  if (absl::Status s = CheckEpsilon(eps0); !s.ok()) return s;
  if (absl::Status s = CheckUsers(n); !s.ok()) return s;
  return static_cast<double>(m - 1) * std::exp(eps0) / (2.0 * n);
}

}  // namespace shuffle_leakage
