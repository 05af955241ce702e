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

// Local randomizers, k-ary randomized response, and blanket decompositions
// of distribution families and randomizers.

#ifndef SHUFFLE_LEAKAGE_MECHANISMS_H_
#define SHUFFLE_LEAKAGE_MECHANISMS_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "shuffle_leakage/probability.h"
#include "shuffle_leakage/rng.h"

namespace shuffle_leakage {

// A row-stochastic kernel: row x is the output law R_x of input x.
class Randomizer {
 public:
  static absl::StatusOr<Randomizer> Create(
      std::vector<Label> input_labels, std::vector<Label> output_labels,
      std::vector<std::vector<double>> kernel);

  const std::vector<Label>& input_labels() const { return input_labels_; }
  const std::vector<Label>& output_labels() const { return output_labels_; }
  const std::vector<std::vector<double>>& kernel() const { return kernel_; }
  size_t num_inputs() const { return input_labels_.size(); }
  size_t num_outputs() const { return output_labels_.size(); }

  std::optional<size_t> InputIndex(std::string_view label) const;
  std::optional<size_t> OutputIndex(std::string_view label) const;
  // Row x as a distribution over the output labels.
  Categorical Row(size_t x) const;

 private:
  Randomizer(std::vector<Label> inputs, std::vector<Label> outputs,
             std::vector<std::vector<double>> kernel)
      : input_labels_(std::move(inputs)),
        output_labels_(std::move(outputs)),
        kernel_(std::move(kernel)) {}

  std::vector<Label> input_labels_;
  std::vector<Label> output_labels_;
  std::vector<std::vector<double>> kernel_;
};

// k-ary randomized response on labels "1".."k": keeps the input with
// probability (e^eps0 - 1) / (e^eps0 + k - 1), otherwise reports a uniform
// symbol. Requires k >= 2 and a finite eps0 > 0.
absl::StatusOr<Randomizer> MakeKrr(int k, double eps0);

// Randomizer mapping input i to the i-th source distribution. Sources are
// aligned to the union of their alphabets; inputs are labeled "1".."n".
absl::StatusOr<Randomizer> RandomizerFromFamily(
    std::span<const Categorical> sources);

// The pure local-DP level of R: the largest log-likelihood ratio between two
// rows at a common output. Infinite when some output is possible under one
// input and impossible under another.
double LdpEpsilon(const Randomizer& r);

// Input-marginal output law: sum_x prior(x) R_x. `prior` is aligned to the
// randomizer's inputs by label.
absl::StatusOr<Categorical> OutputMarginal(const Randomizer& r,
                                           const Categorical& prior);

struct BlanketDecomposition {
  // Total mass of the coordinatewise infimum.
  double gamma = 0.0;
  // Normalized infimum; nullopt when gamma == 0.
  std::optional<Categorical> blanket;
  // Infimum masses over the alphabet plus 1 - gamma on kBottomLabel.
  Categorical generalized_blanket;
  // leftovers[i] is the residual law of source (or input) i. Empty when
  // gamma == 1; equal to the sources themselves when gamma == 0.
  std::vector<Categorical> leftovers;
};

// Blanket decomposition of a family of distributions (users 2..n).
absl::StatusOr<BlanketDecomposition> BlanketOfFamily(
    std::span<const Categorical> sources);

// Blanket decomposition of a randomizer; leftovers are indexed by input.
absl::StatusOr<BlanketDecomposition> BlanketOfRandomizer(const Randomizer& r);

// Blanket post-processing: each kBottomLabel in `z_reduced`, scanned left to
// right, is replaced by a draw from the leftover of a user chosen uniformly
// among users 2..n not chosen before. `leftovers` lists users 2..n in order,
// so it must have |z_reduced| - 1 entries.
absl::StatusOr<std::vector<Label>> PostprocessBlanket(
    std::span<const Label> z_reduced, std::span<const Categorical> leftovers,
    Rng& rng);

// Exact output law of PostprocessBlanket for a fixed input sequence,
// obtained by enumerating every user choice and leftover draw.
absl::StatusOr<std::map<std::vector<Label>, double>> PostprocessBlanketLaw(
    std::span<const Label> z_reduced, std::span<const Categorical> leftovers);

}  // namespace shuffle_leakage

#endif  // SHUFFLE_LEAKAGE_MECHANISMS_H_
