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

#include "shuffle_leakage/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "shuffle_leakage/numeric.h"

namespace shuffle_leakage {

absl::StatusOr<Randomizer> Randomizer::Create(
    std::vector<Label> input_labels, std::vector<Label> output_labels,
    std::vector<std::vector<double>> kernel) {
  if (input_labels.empty() || output_labels.empty()) {
    return absl::InvalidArgumentError(
        "randomizer needs at least one input and one output");
  }
  if (kernel.size() != input_labels.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("kernel has ", kernel.size(), " rows for ",
                     input_labels.size(), " inputs"));
  }
  std::set<std::string_view> seen;
  for (const Label& label : input_labels) {
    if (!seen.insert(label).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate input label '", label, "'"));
    }
  }
  for (size_t x = 0; x < kernel.size(); ++x) {
    if (kernel[x].size() != output_labels.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("kernel row ", x, " has ", kernel[x].size(),
                       " entries for ", output_labels.size(), " outputs"));
    }
    // Validates entries, distinct output labels, and the row sum.
    absl::StatusOr<Categorical> row =
        Categorical::Create(output_labels, kernel[x]);
    if (!row.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("kernel row ", x, ": ", row.status().message()));
    }
    kernel[x] = row->probs();
  }
  return Randomizer(std::move(input_labels), std::move(output_labels),
                    std::move(kernel));
}

std::optional<size_t> Randomizer::InputIndex(std::string_view label) const {
  auto it = std::find(input_labels_.begin(), input_labels_.end(), label);
  if (it == input_labels_.end()) return std::nullopt;
  return static_cast<size_t>(it - input_labels_.begin());
}

std::optional<size_t> Randomizer::OutputIndex(std::string_view label) const {
  auto it = std::find(output_labels_.begin(), output_labels_.end(), label);
  if (it == output_labels_.end()) return std::nullopt;
  return static_cast<size_t>(it - output_labels_.begin());
}

Categorical Randomizer::Row(size_t x) const {
  return *Categorical::Create(output_labels_, kernel_[x]);
}

absl::StatusOr<Randomizer> MakeKrr(int k, double eps0) {
  if (k < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("randomized response needs k >= 2, got ", k));
  }
  if (!std::isfinite(eps0) || eps0 <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("randomized response needs finite eps0 > 0, got ", eps0));
  }
  const double e = std::exp(eps0);
  const double denom = e + k - 1;
  std::vector<Label> labels;
  for (int i = 1; i <= k; ++i) labels.push_back(std::to_string(i));
  std::vector<std::vector<double>> kernel(k, std::vector<double>(k, 1.0 / denom));
  for (int i = 0; i < k; ++i) kernel[i][i] = e / denom;
  return Randomizer::Create(labels, labels, std::move(kernel));
}

absl::StatusOr<Randomizer> RandomizerFromFamily(
    std::span<const Categorical> sources) {
  if (sources.empty()) {
    return absl::InvalidArgumentError("family needs at least one source");
  }
  std::vector<Label> outputs;
  for (const Categorical& s : sources) {
    for (const Label& label : s.labels()) {
      if (std::find(outputs.begin(), outputs.end(), label) == outputs.end()) {
        outputs.push_back(label);
      }
    }
  }
  std::vector<Label> inputs;
  std::vector<std::vector<double>> kernel;
  for (size_t i = 0; i < sources.size(); ++i) {
    inputs.push_back(std::to_string(i + 1));
    kernel.push_back(*ProjectOnto(sources[i], outputs));
  }
  return Randomizer::Create(std::move(inputs), std::move(outputs),
                            std::move(kernel));
}

double LdpEpsilon(const Randomizer& r) {
  double eps = 0.0;
  for (size_t y = 0; y < r.num_outputs(); ++y) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (size_t x = 0; x < r.num_inputs(); ++x) {
      lo = std::min(lo, r.kernel()[x][y]);
      hi = std::max(hi, r.kernel()[x][y]);
    }
    if (hi <= 0.0) continue;
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    eps = std::max(eps, std::log(hi / lo));
  }
  return eps;
}

absl::StatusOr<Categorical> OutputMarginal(const Randomizer& r,
                                           const Categorical& prior) {
  absl::StatusOr<std::vector<double>> weights =
      ProjectOnto(prior, r.input_labels());
  if (!weights.ok()) return weights.status();
  std::vector<double> out(r.num_outputs());
  for (size_t y = 0; y < r.num_outputs(); ++y) {
    CompensatedSum sum;
    for (size_t x = 0; x < r.num_inputs(); ++x) {
      sum.Add((*weights)[x] * r.kernel()[x][y]);
    }
    out[y] = sum.Total();
  }
  return Categorical::Create(r.output_labels(), std::move(out));
}

namespace {

// Decomposes rows that share the alphabet `labels`.
absl::StatusOr<BlanketDecomposition> DecomposeRows(
    const std::vector<Label>& labels,
    const std::vector<std::vector<double>>& rows) {
  if (std::find(labels.begin(), labels.end(), kBottomLabel) != labels.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("alphabet already contains the reserved label ",
                     kBottomLabel));
  }
  const size_t d = labels.size();
  std::vector<double> infimum(d, std::numeric_limits<double>::infinity());
  for (const auto& row : rows) {
    for (size_t y = 0; y < d; ++y) infimum[y] = std::min(infimum[y], row[y]);
  }
  bool exact_match = true;
  for (const auto& row : rows) {
    for (size_t y = 0; y < d; ++y) exact_match &= (row[y] == infimum[y]);
  }

  const double gamma =
      exact_match ? 1.0 : std::min(1.0, SumCompensated(infimum));

  std::vector<Label> bar_labels = labels;
  bar_labels.emplace_back(kBottomLabel);
  std::vector<double> bar_probs = infimum;
  bar_probs.push_back(1.0 - gamma);
  absl::StatusOr<Categorical> bar =
      Categorical::Create(std::move(bar_labels), std::move(bar_probs));
  if (!bar.ok()) return bar.status();
  BlanketDecomposition out{gamma, std::nullopt, *std::move(bar), {}};

  if (out.gamma > 0.0) {
    std::vector<double> blanket(d);
    const double total = SumCompensated(infimum);
    for (size_t y = 0; y < d; ++y) blanket[y] = infimum[y] / total;
    out.blanket = *Categorical::Create(labels, std::move(blanket));
  }
  if (exact_match) return out;

  for (const auto& row : rows) {
    std::vector<double> residual(d);
    for (size_t y = 0; y < d; ++y) residual[y] = row[y] - infimum[y];
    // The residual mass equals 1 - gamma up to rounding; normalizing by it
    // keeps leftovers exact when gamma is close to one.
    const double mass = SumCompensated(residual);
    if (mass > 0.0) {
      for (double& v : residual) v /= mass;
    } else {
      residual = row;  // row equals the infimum up to rounding
    }
    absl::StatusOr<Categorical> lo = Categorical::Create(labels, residual);
    if (!lo.ok()) return lo.status();
    out.leftovers.push_back(*std::move(lo));
  }
  return out;
}

}  // namespace

absl::StatusOr<BlanketDecomposition> BlanketOfFamily(
    std::span<const Categorical> sources) {
  absl::StatusOr<Randomizer> r = RandomizerFromFamily(sources);
  if (!r.ok()) return r.status();
  return DecomposeRows(r->output_labels(), r->kernel());
}

absl::StatusOr<BlanketDecomposition> BlanketOfRandomizer(const Randomizer& r) {
  return DecomposeRows(r.output_labels(), r.kernel());
}

namespace {

absl::Status ValidateReduced(std::span<const Label> z_reduced,
                             std::span<const Categorical> leftovers) {
  const size_t bottoms = static_cast<size_t>(
      std::count(z_reduced.begin(), z_reduced.end(), kBottomLabel));
  if (bottoms == 0) return absl::OkStatus();
  if (z_reduced.empty() || leftovers.size() + 1 != z_reduced.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected ", z_reduced.size() - 1, " leftovers, got ",
                     leftovers.size()));
  }
  if (bottoms > leftovers.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat(bottoms, " placeholder symbols but only ",
                     leftovers.size(), " users to draw from"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<std::vector<Label>> PostprocessBlanket(
    std::span<const Label> z_reduced, std::span<const Categorical> leftovers,
    Rng& rng) {
  if (absl::Status s = ValidateReduced(z_reduced, leftovers); !s.ok()) return s;
  std::vector<Label> z(z_reduced.begin(), z_reduced.end());
  // Users not yet chosen, as indices into `leftovers`.
  std::vector<size_t> available(leftovers.size());
  for (size_t j = 0; j < available.size(); ++j) available[j] = j;
  for (Label& symbol : z) {
    if (symbol != kBottomLabel) continue;
    const size_t pick = static_cast<size_t>(rng.UniformInt(available.size()));
    const Categorical& lo = leftovers[available[pick]];
    available.erase(available.begin() + pick);
    symbol = lo.labels()[DiscreteSampler(lo.probs()).Sample(rng)];
  }
  return z;
}

namespace {

void EnumeratePostprocess(std::span<const Categorical> leftovers,
                          std::vector<Label>& z, size_t pos,
                          std::vector<bool>& used, size_t num_used,
                          double prob,
                          std::map<std::vector<Label>, double>& law) {
  while (pos < z.size() && z[pos] != kBottomLabel) ++pos;
  if (pos == z.size()) {
    law[z] += prob;
    return;
  }
  const double choice = 1.0 / static_cast<double>(leftovers.size() - num_used);
  for (size_t j = 0; j < leftovers.size(); ++j) {
    if (used[j]) continue;
    used[j] = true;
    const Categorical& lo = leftovers[j];
    for (size_t y = 0; y < lo.size(); ++y) {
      if (lo.probs()[y] <= 0.0) continue;
      z[pos] = lo.labels()[y];
      EnumeratePostprocess(leftovers, z, pos + 1, used, num_used + 1,
                           prob * choice * lo.probs()[y], law);
    }
    z[pos] = Label(kBottomLabel);
    used[j] = false;
  }
}

}  // namespace

absl::StatusOr<std::map<std::vector<Label>, double>> PostprocessBlanketLaw(
    std::span<const Label> z_reduced, std::span<const Categorical> leftovers) {
  if (absl::Status s = ValidateReduced(z_reduced, leftovers); !s.ok()) return s;
  std::map<std::vector<Label>, double> law;
  std::vector<Label> z(z_reduced.begin(), z_reduced.end());
  std::vector<bool> used(leftovers.size(), false);
  EnumeratePostprocess(leftovers, z, 0, used, 0, 1.0, law);
  return law;
}

}  // namespace shuffle_leakage
