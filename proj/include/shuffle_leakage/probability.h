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

// Finite categorical distributions over labeled alphabets and the
// divergences between them. All information quantities are in nats.

#ifndef SHUFFLE_LEAKAGE_PROBABILITY_H_
#define SHUFFLE_LEAKAGE_PROBABILITY_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace shuffle_leakage {

using Label = std::string;

// Placeholder symbol for non-blanket outcomes in a generalized blanket.
inline constexpr char kBottomLabel[] = "_|_";

// Maximum tolerated deviation of a probability vector's sum from one.
inline constexpr double kProbabilitySumTolerance = 1e-9;

// An immutable probability mass function over a finite, ordered set of
// distinct labels. Labels with zero mass are kept; they are part of the
// alphabet but not of the support.
class Categorical {
 public:
  // Validates and builds a distribution. Weights must be finite and
  // nonnegative and sum to one within kProbabilitySumTolerance; they are then
  // renormalized once so the stored sum is one up to rounding.
  static absl::StatusOr<Categorical> Create(std::vector<Label> labels,
                                            std::vector<double> probs);

  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<double>& probs() const { return probs_; }
  size_t size() const { return labels_.size(); }

  std::optional<size_t> IndexOf(std::string_view label) const;
  // Mass at `label`; zero for labels outside the alphabet.
  double Prob(std::string_view label) const;
  // Labels with strictly positive mass, in alphabet order.
  std::vector<Label> Support() const;

  friend bool operator==(const Categorical&, const Categorical&) = default;

 private:
  Categorical(std::vector<Label> labels, std::vector<double> probs)
      : labels_(std::move(labels)), probs_(std::move(probs)) {}

  std::vector<Label> labels_;
  std::vector<double> probs_;
};

// Two distributions expressed over the union of their alphabets. Labels of
// the first operand come first, in order, followed by new labels of the
// second; missing labels carry zero mass.
struct AlignedPair {
  std::vector<Label> labels;
  std::vector<double> first;
  std::vector<double> second;
};

AlignedPair Align(const Categorical& first, const Categorical& second);

// Re-expresses `dist` over `labels` (zero-padded). Fails if `dist` has
// positive mass on a label missing from `labels`.
absl::StatusOr<std::vector<double>> ProjectOnto(
    const Categorical& dist, const std::vector<Label>& labels);

// Uniform distribution on labels "1".."m".
absl::StatusOr<Categorical> MakeUniform(int m);

// Zipf(m, alpha) on labels "1".."m": p_i proportional to i^-alpha.
absl::StatusOr<Categorical> MakeZipf(int m, double alpha);

// Point mass on `label`.
Categorical MakePointMass(const Label& label);

// Shannon entropy with 0 log 0 = 0.
double Entropy(const Categorical& p);

// KL(P || Q). Returns kFailedPrecondition when P is not absolutely
// continuous with respect to Q.
absl::StatusOr<double> KlDivergence(const Categorical& p, const Categorical& q);

// chi^2(P || Q) = sum over support(Q) of (p - q)^2 / q. Same precondition as
// KlDivergence.
absl::StatusOr<double> Chi2Divergence(const Categorical& p,
                                      const Categorical& q);

// Splits P against the support of Q. `beta` is the P-mass on labels with
// positive P and zero Q. `restricted` is P conditioned on the remaining
// labels, or nullopt when beta == 1.
struct SupportSplit {
  double beta = 0.0;
  std::optional<Categorical> restricted;
};

SupportSplit SplitSupport(const Categorical& p, const Categorical& q);

// True when every label with positive P-mass has positive Q-mass.
bool IsAbsolutelyContinuous(const Categorical& p, const Categorical& q);

}  // namespace shuffle_leakage

#endif  // SHUFFLE_LEAKAGE_PROBABILITY_H_
