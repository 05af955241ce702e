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

#include "shuffle_leakage/probability.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "shuffle_leakage/numeric.h"

namespace shuffle_leakage {

absl::StatusOr<Categorical> Categorical::Create(std::vector<Label> labels,
                                                std::vector<double> probs) {
  if (labels.empty()) {
    return absl::InvalidArgumentError("distribution needs at least one label");
  }
  if (labels.size() != probs.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("got ", labels.size(), " labels but ", probs.size(),
                     " probabilities"));
  }
  std::set<std::string_view> seen;
  for (const Label& label : labels) {
    if (!seen.insert(label).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate label '", label, "'"));
    }
  }
  CompensatedSum sum;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("probability ", p, " is not a finite nonnegative value"));
    }
    sum.Add(p);
  }
  const double total = sum.Total();
  if (std::abs(total - 1.0) > kProbabilitySumTolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat("probabilities sum to ", total, ", not 1"));
  }
  for (double& p : probs) p /= total;
  return Categorical(std::move(labels), std::move(probs));
}

std::optional<size_t> Categorical::IndexOf(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<size_t>(it - labels_.begin());
}

double Categorical::Prob(std::string_view label) const {
  std::optional<size_t> i = IndexOf(label);
  return i ? probs_[*i] : 0.0;
}

std::vector<Label> Categorical::Support() const {
  std::vector<Label> support;
  for (size_t i = 0; i < labels_.size(); ++i) {
    if (probs_[i] > 0.0) support.push_back(labels_[i]);
  }
  return support;
}

AlignedPair Align(const Categorical& first, const Categorical& second) {
  AlignedPair out;
  out.labels = first.labels();
  out.first = first.probs();
  for (const Label& label : second.labels()) {
    if (!first.IndexOf(label)) {
      out.labels.push_back(label);
      out.first.push_back(0.0);
    }
  }
  out.second.reserve(out.labels.size());
  for (const Label& label : out.labels) out.second.push_back(second.Prob(label));
  return out;
}

absl::StatusOr<std::vector<double>> ProjectOnto(
    const Categorical& dist, const std::vector<Label>& labels) {
  std::vector<double> out(labels.size(), 0.0);
  for (size_t i = 0; i < dist.size(); ++i) {
    auto it = std::find(labels.begin(), labels.end(), dist.labels()[i]);
    if (it == labels.end()) {
      if (dist.probs()[i] > 0.0) {
        return absl::InvalidArgumentError(absl::StrCat(
            "label '", dist.labels()[i], "' is outside the target alphabet"));
      }
      continue;
    }
    out[it - labels.begin()] = dist.probs()[i];
  }
  return out;
}

namespace {

std::vector<Label> IndexLabels(int m) {
  std::vector<Label> labels;
  labels.reserve(m);
  for (int i = 1; i <= m; ++i) labels.push_back(std::to_string(i));
  return labels;
}

}  // namespace

absl::StatusOr<Categorical> MakeUniform(int m) {
  if (m < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("uniform distribution needs m >= 1, got ", m));
  }
  return Categorical::Create(IndexLabels(m), std::vector<double>(m, 1.0 / m));
}

absl::StatusOr<Categorical> MakeZipf(int m, double alpha) {
  if (m < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("Zipf distribution needs m >= 1, got ", m));
  }
  if (!std::isfinite(alpha) || alpha < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("Zipf exponent must be finite and >= 0, got ", alpha));
  }
  std::vector<double> weights(m);
  CompensatedSum norm;
  for (int i = 1; i <= m; ++i) {
    weights[i - 1] = std::pow(static_cast<double>(i), -alpha);
    norm.Add(weights[i - 1]);
  }
  for (double& w : weights) w /= norm.Total();
  return Categorical::Create(IndexLabels(m), std::move(weights));
}

Categorical MakePointMass(const Label& label) {
  return *Categorical::Create({label}, {1.0});
}

double Entropy(const Categorical& p) {
  CompensatedSum sum;
  for (double pi : p.probs()) sum.Add(-XLogX(pi));
  return std::max(sum.Total(), 0.0);
}

namespace {

absl::Status ContinuityError(const Label& label) {
  return absl::FailedPreconditionError(absl::StrCat(
      "absolute continuity violated: P has mass on '", label,
      "' where Q has none"));
}

}  // namespace

absl::StatusOr<double> KlDivergence(const Categorical& p,
                                    const Categorical& q) {
  AlignedPair a = Align(p, q);
  CompensatedSum sum;
  for (size_t i = 0; i < a.labels.size(); ++i) {
    const double pi = a.first[i];
    const double qi = a.second[i];
    if (pi <= 0.0) continue;
    if (qi <= 0.0) return ContinuityError(a.labels[i]);
    sum.Add(pi * std::log(pi / qi));
  }
  return std::max(sum.Total(), 0.0);
}

absl::StatusOr<double> Chi2Divergence(const Categorical& p,
                                      const Categorical& q) {
  AlignedPair a = Align(p, q);
  CompensatedSum sum;
  for (size_t i = 0; i < a.labels.size(); ++i) {
    const double pi = a.first[i];
    const double qi = a.second[i];
    if (qi <= 0.0) {
      if (pi > 0.0) return ContinuityError(a.labels[i]);
      continue;
    }
    const double d = pi - qi;
    sum.Add(d * d / qi);
  }
  return std::max(sum.Total(), 0.0);
}

SupportSplit SplitSupport(const Categorical& p, const Categorical& q) {
  CompensatedSum beta;
  std::vector<Label> kept_labels;
  std::vector<double> kept;
  for (size_t i = 0; i < p.size(); ++i) {
    const double pi = p.probs()[i];
    if (pi > 0.0 && q.Prob(p.labels()[i]) <= 0.0) {
      beta.Add(pi);
    } else {
      kept_labels.push_back(p.labels()[i]);
      kept.push_back(pi);
    }
  }
  SupportSplit split;
  split.beta = std::min(1.0, beta.Total());
  const double rest = SumCompensated(kept);
  if (rest <= 0.0) {
    split.beta = 1.0;
    return split;
  }
  for (double& v : kept) v /= rest;
  split.restricted = *Categorical::Create(std::move(kept_labels), std::move(kept));
  return split;
}

bool IsAbsolutelyContinuous(const Categorical& p, const Categorical& q) {
  for (size_t i = 0; i < p.size(); ++i) {
    if (p.probs()[i] > 0.0 && q.Prob(p.labels()[i]) <= 0.0) return false;
  }
  return true;
}

}  // namespace shuffle_leakage
