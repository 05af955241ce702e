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

#include "shuffle_leakage/shuffle_core.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "shuffle_leakage/numeric.h"

namespace shuffle_leakage {

Histogram Histogram::FromMessages(std::span<const Label> messages) {
  Histogram h;
  for (const Label& m : messages) ++h.counts[m];
  h.total = static_cast<int64_t>(messages.size());
  return h;
}

int64_t Histogram::Count(const Label& label) const {
  auto it = counts.find(label);
  return it == counts.end() ? 0 : it->second;
}

namespace {

// Shuffles `reports` (report 0 is the target's) and records where the
// target's report landed.
ShuffleSample ShuffleReports(std::vector<Label> reports, Rng& rng) {
  std::vector<size_t> order(reports.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Shuffle(order, rng);
  ShuffleSample sample;
  sample.y1 = reports[0];
  sample.z.reserve(reports.size());
  for (size_t i = 0; i < order.size(); ++i) {
    if (order[i] == 0) sample.k_true = static_cast<int>(i) + 1;
    sample.z.push_back(reports[order[i]]);
  }
  return sample;
}

}  // namespace

absl::StatusOr<ShuffleSample> SampleShuffleOnly(const Categorical& p,
                                                const Categorical& q, int n,
                                                Rng& rng) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of users must be >= 1, got ", n));
  }
  DiscreteSampler target(p.probs());
  DiscreteSampler others(q.probs());
  std::vector<Label> reports;
  reports.reserve(n);
  reports.push_back(p.labels()[target.Sample(rng)]);
  for (int i = 1; i < n; ++i) reports.push_back(q.labels()[others.Sample(rng)]);
  return ShuffleReports(std::move(reports), rng);
}

absl::StatusOr<ShuffleSample> SampleShuffleDp(const Randomizer& r,
                                              std::span<const Label> x_inputs,
                                              Rng& rng) {
  if (x_inputs.empty()) {
    return absl::InvalidArgumentError("need at least one user input");
  }
  std::vector<Label> reports;
  reports.reserve(x_inputs.size());
  for (const Label& x : x_inputs) {
    std::optional<size_t> xi = r.InputIndex(x);
    if (!xi) {
      return absl::InvalidArgumentError(
          absl::StrCat("input '", x, "' is not in the randomizer's domain"));
    }
    DiscreteSampler row(r.kernel()[*xi]);
    reports.push_back(r.output_labels()[row.Sample(rng)]);
  }
  ShuffleSample sample = ShuffleReports(std::move(reports), rng);
  sample.x_inputs = std::vector<Label>(x_inputs.begin(), x_inputs.end());
  return sample;
}

std::vector<double> LikelihoodRatios(std::span<const double> p,
                                     std::span<const double> q) {
  std::vector<double> w(p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) {
      w[i] = 0.0;
    } else if (q[i] <= 0.0) {
      w[i] = std::numeric_limits<double>::infinity();
    } else {
      w[i] = p[i] / q[i];
    }
  }
  return w;
}

absl::StatusOr<std::vector<double>> PosteriorK(std::span<const Label> z,
                                               const Categorical& p,
                                               const Categorical& q) {
  if (z.empty()) return absl::InvalidArgumentError("empty shuffled output");
  std::vector<double> weights(z.size());
  size_t unbounded = 0;
  for (size_t k = 0; k < z.size(); ++k) {
    const double pk = p.Prob(z[k]);
    const double qk = q.Prob(z[k]);
    if (pk <= 0.0 && qk <= 0.0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "symbol '", z[k], "' at position ", k + 1,
          " is impossible under both P and Q"));
    }
    if (qk <= 0.0) {
      weights[k] = std::numeric_limits<double>::infinity();
      ++unbounded;
    } else {
      weights[k] = pk / qk;
    }
  }
  std::vector<double> posterior(z.size(), 0.0);
  if (unbounded > 0) {
    for (size_t k = 0; k < z.size(); ++k) {
      if (std::isinf(weights[k])) posterior[k] = 1.0 / unbounded;
    }
    return posterior;
  }
  const double total = SumCompensated(weights);
  if (total <= 0.0) {
    return absl::InvalidArgumentError(
        "every position has zero likelihood ratio");
  }
  for (size_t k = 0; k < z.size(); ++k) posterior[k] = weights[k] / total;
  return posterior;
}

absl::StatusOr<Categorical> PosteriorY1(std::span<const Label> z,
                                        const Categorical& p,
                                        const Categorical& q) {
  absl::StatusOr<std::vector<double>> pk = PosteriorK(z, p, q);
  if (!pk.ok()) return pk.status();
  std::vector<Label> values;
  std::vector<CompensatedSum> mass;
  for (size_t k = 0; k < z.size(); ++k) {
    auto it = std::find(values.begin(), values.end(), z[k]);
    if (it == values.end()) {
      values.push_back(z[k]);
      mass.emplace_back();
      it = values.end() - 1;
    }
    mass[it - values.begin()].Add((*pk)[k]);
  }
  std::vector<double> probs;
  for (const CompensatedSum& m : mass) probs.push_back(m.Total());
  return Categorical::Create(std::move(values), std::move(probs));
}

absl::StatusOr<Categorical> PosteriorX1Fact1(const Histogram& c,
                                             const Categorical& prior,
                                             const Randomizer& r,
                                             const Categorical& q) {
  if (c.total < 1) {
    return absl::InvalidArgumentError("histogram must hold at least one report");
  }
  absl::StatusOr<std::vector<double>> weights =
      ProjectOnto(prior, r.input_labels());
  if (!weights.ok()) return weights.status();
  std::vector<double> score(r.num_inputs(), 0.0);
  for (const auto& [label, count] : c.counts) {
    if (count <= 0) continue;
    const double qy = q.Prob(label);
    if (qy <= 0.0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "histogram has ", count, " reports of '", label,
          "' but Q assigns it no mass"));
    }
    std::optional<size_t> y = r.OutputIndex(label);
    if (!y) continue;
    for (size_t x = 0; x < r.num_inputs(); ++x) {
      score[x] += static_cast<double>(count) * r.kernel()[x][*y] / qy;
    }
  }
  for (size_t x = 0; x < score.size(); ++x) score[x] *= (*weights)[x];
  const double total = SumCompensated(score);
  if (total <= 0.0) {
    return absl::InvalidArgumentError(
        "histogram is impossible under every input with positive prior mass");
  }
  for (double& s : score) s /= total;
  return Categorical::Create(r.input_labels(), std::move(score));
}

double PositionPosteriorDivergence(std::span<const int64_t> counts,
                                   std::span<const double> ratios) {
  int64_t n = 0;
  int64_t unbounded = 0;
  CompensatedSum weight;
  for (size_t y = 0; y < counts.size(); ++y) {
    n += counts[y];
    if (counts[y] == 0) continue;
    if (std::isinf(ratios[y])) {
      unbounded += counts[y];
    } else {
      weight.Add(static_cast<double>(counts[y]) * ratios[y]);
    }
  }
  const double dn = static_cast<double>(n);
  if (unbounded > 0) return std::log(dn / static_cast<double>(unbounded));
  const double total = weight.Total();
  if (!(total > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  CompensatedSum kl;
  for (size_t y = 0; y < counts.size(); ++y) {
    if (counts[y] == 0 || ratios[y] <= 0.0) continue;
    const double post = ratios[y] / total;
    kl.Add(static_cast<double>(counts[y]) * post * std::log(dn * post));
  }
  return std::max(kl.Total(), 0.0);
}

double MessagePosteriorDivergence(std::span<const int64_t> counts,
                                  std::span<const double> ratios,
                                  std::span<const double> p) {
  int64_t unbounded = 0;
  CompensatedSum weight;
  for (size_t y = 0; y < counts.size(); ++y) {
    if (counts[y] == 0) continue;
    if (std::isinf(ratios[y])) {
      unbounded += counts[y];
    } else {
      weight.Add(static_cast<double>(counts[y]) * ratios[y]);
    }
  }
  CompensatedSum kl;
  if (unbounded > 0) {
    for (size_t y = 0; y < counts.size(); ++y) {
      if (counts[y] == 0 || !std::isinf(ratios[y])) continue;
      const double post =
          static_cast<double>(counts[y]) / static_cast<double>(unbounded);
      kl.Add(post * std::log(post / p[y]));
    }
    return std::max(kl.Total(), 0.0);
  }
  const double total = weight.Total();
  if (!(total > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  for (size_t y = 0; y < counts.size(); ++y) {
    if (counts[y] == 0 || ratios[y] <= 0.0) continue;
    const double post = static_cast<double>(counts[y]) * ratios[y] / total;
    kl.Add(post * std::log(post / p[y]));
  }
  return std::max(kl.Total(), 0.0);
}

}  // namespace shuffle_leakage
