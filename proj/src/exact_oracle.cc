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

#include "shuffle_leakage/exact_oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "shuffle_leakage/numeric.h"
#include "shuffle_leakage/shuffle_core.h"

namespace shuffle_leakage {

double CountCompositions(int64_t total, int64_t parts) {
  if (parts <= 0) return total == 0 ? 1.0 : 0.0;
  return std::round(std::exp(LogBinomialCoefficient(total + parts - 1, parts - 1)));
}

namespace {

void CompositionsFrom(int64_t remaining, size_t index,
                      std::vector<int64_t>& parts,
                      const std::function<void(std::span<const int64_t>)>& fn) {
  if (index + 1 == parts.size()) {
    parts[index] = remaining;
    fn(parts);
    return;
  }
  for (int64_t c = remaining; c >= 0; --c) {
    parts[index] = c;
    CompositionsFrom(remaining - c, index + 1, parts, fn);
  }
}

absl::Status CheckPositiveUsers(int n) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of users must be >= 1, got ", n));
  }
  return absl::OkStatus();
}

absl::Status CheckBudget(double states, const ExactConfig& config,
                         const char* what) {
  if (states > config.max_states) {
    return absl::ResourceExhaustedError(absl::StrCat(
        what, " needs ", states, " enumerated states, above the ceiling of ",
        config.max_states));
  }
  return absl::OkStatus();
}

// P and Q over the labels where at least one of them has mass.
struct ActiveAlphabet {
  std::vector<double> p;
  std::vector<double> q;
};

ActiveAlphabet ActiveSymbols(const Categorical& p, const Categorical& q) {
  AlignedPair a = Align(p, q);
  ActiveAlphabet out;
  for (size_t i = 0; i < a.labels.size(); ++i) {
    if (a.first[i] > 0.0 || a.second[i] > 0.0) {
      out.p.push_back(a.first[i]);
      out.q.push_back(a.second[i]);
    }
  }
  return out;
}

// E_{X~Bin(n,prob)}[(X/n) log(X/n)].
double BinomialXLogX(int n, double prob) {
  CompensatedSum sum;
  const double dn = static_cast<double>(n);
  for (int x = 1; x <= n; ++x) {
    const double mass = BinomialPmf(n, x, prob);
    if (mass == 0.0) continue;
    sum.Add(mass * XLogX(static_cast<double>(x) / dn));
  }
  return sum.Total();
}

}  // namespace

void ForEachComposition(
    int64_t total, int64_t parts,
    const std::function<void(std::span<const int64_t>)>& fn) {
  if (parts <= 0) {
    if (total == 0) fn({});
    return;
  }
  std::vector<int64_t> buffer(parts, 0);
  CompositionsFrom(total, 0, buffer, fn);
}

double LogMultinomialPmf(std::span<const int64_t> counts,
                         std::span<const double> probs) {
  int64_t total = 0;
  double log_mass = 0.0;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    if (probs[i] <= 0.0) return -std::numeric_limits<double>::infinity();
    total += counts[i];
    log_mass += static_cast<double>(counts[i]) * std::log(probs[i]) -
                std::lgamma(static_cast<double>(counts[i]) + 1.0);
  }
  return log_mass + std::lgamma(static_cast<double>(total) + 1.0);
}

absl::StatusOr<double> ExactIKZ(const Categorical& p, const Categorical& q,
                                int n, const ExactConfig& config) {
  if (absl::Status s = CheckPositiveUsers(n); !s.ok()) return s;
  const ActiveAlphabet a = ActiveSymbols(p, q);
  std::vector<size_t> q_support;
  std::vector<double> q_probs;
  size_t p_support = 0;
  for (size_t i = 0; i < a.p.size(); ++i) {
    if (a.q[i] > 0.0) {
      q_support.push_back(i);
      q_probs.push_back(a.q[i]);
    }
    if (a.p[i] > 0.0) ++p_support;
  }
  const double states =
      static_cast<double>(p_support) *
      CountCompositions(n - 1, static_cast<int64_t>(q_support.size()));
  if (absl::Status s = CheckBudget(states, config, "I(K;Z) enumeration");
      !s.ok()) {
    return s;
  }
  const std::vector<double> ratios = LikelihoodRatios(a.p, a.q);
  std::vector<int64_t> counts(a.p.size());
  CompensatedSum total;
  ForEachComposition(n - 1, static_cast<int64_t>(q_support.size()),
                     [&](std::span<const int64_t> others) {
    const double mass = std::exp(LogMultinomialPmf(others, q_probs));
    if (mass == 0.0) return;
    std::fill(counts.begin(), counts.end(), 0);
    for (size_t j = 0; j < q_support.size(); ++j) {
      counts[q_support[j]] = others[j];
    }
    for (size_t y = 0; y < a.p.size(); ++y) {
      if (a.p[y] <= 0.0) continue;
      ++counts[y];
      total.Add(a.p[y] * mass * PositionPosteriorDivergence(counts, ratios));
      --counts[y];
    }
  });
  return std::max(total.Total(), 0.0);
}

absl::StatusOr<double> ExactIY1Z(const Categorical& p, const Categorical& q,
                                 int n, const ExactConfig& config) {
  if (absl::Status s = CheckPositiveUsers(n); !s.ok()) return s;
  const ActiveAlphabet a = ActiveSymbols(p, q);
  const int64_t u = static_cast<int64_t>(a.p.size());
  const double states = static_cast<double>(u) * CountCompositions(n, u);
  if (absl::Status s = CheckBudget(states, config, "I(Y1;Z) enumeration");
      !s.ok()) {
    return s;
  }
  std::vector<int64_t> rest(u);
  std::vector<double> log_joint(u);
  const double kNegInf = -std::numeric_limits<double>::infinity();
  CompensatedSum total;
  ForEachComposition(n, u, [&](std::span<const int64_t> h) {
    // log_joint[y] = log Pr[Y_1 = y, histogram(Z) = h].
    double peak = kNegInf;
    for (int64_t y = 0; y < u; ++y) {
      log_joint[y] = kNegInf;
      if (h[y] == 0 || a.p[y] <= 0.0) continue;
      std::copy(h.begin(), h.end(), rest.begin());
      --rest[y];
      log_joint[y] = std::log(a.p[y]) + LogMultinomialPmf(rest, a.q);
      peak = std::max(peak, log_joint[y]);
    }
    if (peak == kNegInf) return;
    CompensatedSum scaled;
    for (int64_t y = 0; y < u; ++y) {
      if (log_joint[y] != kNegInf) scaled.Add(std::exp(log_joint[y] - peak));
    }
    const double log_pz = peak + std::log(scaled.Total());
    for (int64_t y = 0; y < u; ++y) {
      if (log_joint[y] == kNegInf) continue;
      const double joint = std::exp(log_joint[y]);
      if (joint == 0.0) continue;
      total.Add(joint * (log_joint[y] - log_pz - std::log(a.p[y])));
    }
  });
  return std::max(total.Total(), 0.0);
}

absl::StatusOr<double> ClosedFormIY1PeqQ(const Categorical& p, int n) {
  if (absl::Status s = CheckPositiveUsers(n); !s.ok()) return s;
  CompensatedSum total;
  for (double pi : p.probs()) {
    if (pi <= 0.0) continue;
    total.Add(BinomialXLogX(n, pi));
    total.Add(-XLogX(pi));
  }
  return std::max(total.Total(), 0.0);
}

absl::StatusOr<double> ClosedFormValueChannel(const Categorical& p,
                                              const Categorical& q, int n) {
  if (absl::Status s = CheckPositiveUsers(n); !s.ok()) return s;
  AlignedPair a = Align(p, q);
  CompensatedSum total;
  for (size_t i = 0; i < a.labels.size(); ++i) {
    const double pi = a.first[i];
    const double qi = a.second[i];
    if (pi <= 0.0) continue;
    if (qi <= 0.0) {
      return absl::FailedPreconditionError(absl::StrCat(
          "absolute continuity violated: P has mass on '", a.labels[i],
          "' where Q has none"));
    }
    total.Add(pi / qi * BinomialXLogX(n, qi));
    total.Add(-XLogX(pi));
  }
  return total.Total();
}

namespace {

// Histogram over a small alphabet packed into 64 bits.
class HistogramPacker {
 public:
  HistogramPacker(size_t symbols, int64_t max_count) : symbols_(symbols) {
    bits_ = 1;
    while ((int64_t{1} << bits_) <= max_count) ++bits_;
  }
  bool fits() const { return symbols_ * bits_ <= 64; }
  uint64_t Unit(size_t symbol) const { return uint64_t{1} << (symbol * bits_); }

 private:
  size_t symbols_;
  size_t bits_;
};

}  // namespace

absl::StatusOr<double> ExactInputLeakage(const Categorical& prior,
                                         const Randomizer& r,
                                         std::span<const Categorical> others,
                                         const ExactConfig& config) {
  absl::StatusOr<std::vector<double>> weights =
      ProjectOnto(prior, r.input_labels());
  if (!weights.ok()) return weights.status();

  std::vector<Label> alphabet = r.output_labels();
  for (const Categorical& o : others) {
    for (const Label& label : o.labels()) {
      if (std::find(alphabet.begin(), alphabet.end(), label) == alphabet.end()) {
        alphabet.push_back(label);
      }
    }
  }
  const size_t u = alphabet.size();
  const int64_t n = static_cast<int64_t>(others.size()) + 1;
  const double states =
      static_cast<double>(u) * CountCompositions(n, static_cast<int64_t>(u));
  if (absl::Status s = CheckBudget(states, config, "I(X1;Z) enumeration");
      !s.ok()) {
    return s;
  }
  HistogramPacker packer(u, n);
  if (!packer.fits()) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "histograms of ", n, " reports over ", u,
        " symbols do not fit the packed representation"));
  }

  // Law of the other users' histogram.
  std::unordered_map<uint64_t, double> law = {{0, 1.0}};
  for (const Categorical& o : others) {
    std::vector<double> probs = *ProjectOnto(o, alphabet);
    std::unordered_map<uint64_t, double> next;
    next.reserve(law.size() * u);
    for (const auto& [key, mass] : law) {
      for (size_t y = 0; y < u; ++y) {
        if (probs[y] > 0.0) next[key + packer.Unit(y)] += mass * probs[y];
      }
    }
    law = std::move(next);
  }
  std::vector<std::pair<uint64_t, double>> other_law(law.begin(), law.end());
  std::sort(other_law.begin(), other_law.end());

  // Pr[histogram(Z) = h | X_1 = x], per x.
  const size_t k = r.num_inputs();
  std::unordered_map<uint64_t, std::vector<double>> likelihood;
  for (const auto& [key, mass] : other_law) {
    for (size_t y = 0; y < r.num_outputs(); ++y) {
      auto [it, inserted] = likelihood.try_emplace(key + packer.Unit(y));
      if (inserted) it->second.assign(k, 0.0);
      for (size_t x = 0; x < k; ++x) {
        it->second[x] += mass * r.kernel()[x][y];
      }
    }
  }
  std::vector<uint64_t> keys;
  keys.reserve(likelihood.size());
  for (const auto& entry : likelihood) keys.push_back(entry.first);
  std::sort(keys.begin(), keys.end());

  CompensatedSum total;
  for (uint64_t key : keys) {
    const std::vector<double>& lx = likelihood[key];
    CompensatedSum marginal;
    for (size_t x = 0; x < k; ++x) marginal.Add((*weights)[x] * lx[x]);
    const double pz = marginal.Total();
    if (pz <= 0.0) continue;
    for (size_t x = 0; x < k; ++x) {
      if ((*weights)[x] <= 0.0 || lx[x] <= 0.0) continue;
      total.Add((*weights)[x] * lx[x] * std::log(lx[x] / pz));
    }
  }
  return std::max(total.Total(), 0.0);
}

absl::StatusOr<double> ExactIX1GivenXrest(const Randomizer& r,
                                          const Categorical& prior,
                                          std::span<const Label> x_rest,
                                          const ExactConfig& config) {
  std::vector<Categorical> others;
  others.reserve(x_rest.size());
  for (const Label& x : x_rest) {
    std::optional<size_t> xi = r.InputIndex(x);
    if (!xi) {
      return absl::InvalidArgumentError(
          absl::StrCat("input '", x, "' is not in the randomizer's domain"));
    }
    others.push_back(r.Row(*xi));
  }
  return ExactInputLeakage(prior, r, others, config);
}

absl::StatusOr<double> ExactIX1Iid(const Randomizer& r,
                                   const Categorical& prior, int n,
                                   const ExactConfig& config) {
  if (absl::Status s = CheckPositiveUsers(n); !s.ok()) return s;
  absl::StatusOr<Categorical> marginal = OutputMarginal(r, prior);
  if (!marginal.ok()) return marginal.status();
  std::vector<Categorical> others(n - 1, *marginal);
  return ExactInputLeakage(prior, r, others, config);
}

absl::StatusOr<double> ExactIX1BlanketMix(const Randomizer& r,
                                          const Categorical& prior, int n,
                                          const ExactConfig& config) {
  if (absl::Status s = CheckPositiveUsers(n); !s.ok()) return s;
  absl::StatusOr<BlanketDecomposition> blanket = BlanketOfRandomizer(r);
  if (!blanket.ok()) return blanket.status();
  std::vector<Categorical> others(n - 1, blanket->generalized_blanket);
  return ExactInputLeakage(prior, r, others, config);
}

absl::StatusOr<PositionLeakage> ExactPositionLeakageDp(
    const Randomizer& r, std::span<const Label> x_inputs,
    const ExactConfig& config) {
  const size_t n = x_inputs.size();
  if (n == 0) return absl::InvalidArgumentError("need at least one user input");
  std::vector<size_t> inputs;
  for (const Label& x : x_inputs) {
    std::optional<size_t> xi = r.InputIndex(x);
    if (!xi) {
      return absl::InvalidArgumentError(
          absl::StrCat("input '", x, "' is not in the randomizer's domain"));
    }
    inputs.push_back(*xi);
  }
  const size_t d = r.num_outputs();
  const double states = std::pow(static_cast<double>(d), static_cast<double>(n)) *
                        std::tgamma(static_cast<double>(n) + 1.0);
  if (absl::Status s = CheckBudget(states, config, "position enumeration");
      !s.ok()) {
    return s;
  }
  const double norm = std::tgamma(static_cast<double>(n));  // (n - 1)!
  const double dn = static_cast<double>(n);

  PositionLeakage out;
  CompensatedSum info;
  std::vector<size_t> z(n, 0);
  std::vector<size_t> users(n);
  std::vector<double> given_k(n);
  while (true) {
    // users[i] is the user whose report sits at position i.
    std::iota(users.begin(), users.end(), size_t{0});
    std::fill(given_k.begin(), given_k.end(), 0.0);
    do {
      double product = 1.0;
      for (size_t i = 0; i < n && product > 0.0; ++i) {
        product *= r.kernel()[inputs[users[i]]][z[i]];
      }
      if (product > 0.0) {
        const size_t k = std::find(users.begin(), users.end(), 0) - users.begin();
        given_k[k] += product;
      }
    } while (std::next_permutation(users.begin(), users.end()));

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    CompensatedSum sum;
    for (double& v : given_k) {
      v /= norm;
      sum.Add(v);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double average = sum.Total() / dn;
    if (hi > 0.0) {
      out.max_log_ratio =
          lo > 0.0 ? std::max(out.max_log_ratio, std::log(hi / lo))
                   : std::numeric_limits<double>::infinity();
      for (double v : given_k) {
        if (v > 0.0) info.Add(v / dn * std::log(v / average));
      }
    }

    size_t pos = 0;
    while (pos < n && ++z[pos] == d) z[pos++] = 0;
    if (pos == n) break;
  }
  out.mutual_information = std::max(info.Total(), 0.0);
  return out;
}

absl::StatusOr<double> ExactIKZDp(const Randomizer& r,
                                  std::span<const Label> x_inputs,
                                  const ExactConfig& config) {
  absl::StatusOr<PositionLeakage> leakage =
      ExactPositionLeakageDp(r, x_inputs, config);
  if (!leakage.ok()) return leakage.status();
  return leakage->mutual_information;
}

}  // namespace shuffle_leakage
