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

#include "shuffle_leakage/montecarlo.h"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "shuffle_leakage/numeric.h"
#include "shuffle_leakage/shuffle_core.h"

namespace shuffle_leakage {

absl::StatusOr<EstimatorResult> EstimateMean(
    const std::function<double(Rng&)>& statistic, const McOptions& options) {
  if (options.samples < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("need at least one sample, got ", options.samples));
  }
  const int64_t samples = options.samples;
  int workers = options.workers > 0
                    ? options.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = static_cast<int>(std::clamp<int64_t>(workers, 1, samples));

  std::vector<double> values(samples);
  auto run_block = [&](int64_t begin, int64_t end) {
    for (int64_t i = begin; i < end; ++i) {
      Rng rng(options.seed, static_cast<uint64_t>(i));
      values[i] = statistic(rng);
    }
  };
  if (workers == 1) {
    run_block(0, samples);
  } else {
    std::vector<std::thread> threads;
    const int64_t block = (samples + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int64_t begin = w * block;
      const int64_t end = std::min(samples, begin + block);
      if (begin >= end) break;
      threads.emplace_back(run_block, begin, end);
    }
    for (std::thread& t : threads) t.join();
  }

  const double mean = SumCompensated(values) / static_cast<double>(samples);
  CompensatedSum squares;
  for (double v : values) squares.Add((v - mean) * (v - mean));
  const double variance = squares.Total() / static_cast<double>(samples);

  EstimatorResult result;
  result.estimate = mean;
  result.standard_error = std::sqrt(variance / static_cast<double>(samples));
  result.samples = samples;
  result.seed = options.seed;
  return result;
}

namespace {

absl::Status CheckUsers(int n) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of users must be >= 1, got ", n));
  }
  return absl::OkStatus();
}

// Adds `draws` independent samples from `sampler` to `counts`.
void AddDraws(const DiscreteSampler& sampler, int64_t draws, Rng& rng,
              std::vector<int64_t>& counts) {
  for (int64_t i = 0; i < draws; ++i) ++counts[sampler.Sample(rng)];
}

// Both basic-configuration statistics depend on Z only through its symbol
// histogram, so samples draw the histogram directly.
enum class Target { kPosition, kMessage };

absl::StatusOr<EstimatorResult> BasicEstimate(const Categorical& p,
                                              const Categorical& q, int n,
                                              const McOptions& options,
                                              Target target) {
  if (absl::Status s = CheckUsers(n); !s.ok()) return s;
  const AlignedPair a = Align(p, q);
  const std::vector<double> ratios = LikelihoodRatios(a.first, a.second);
  const DiscreteSampler target_sampler(a.first);
  const DiscreteSampler other_sampler(a.second);
  const size_t u = a.labels.size();
  return EstimateMean(
      [&](Rng& rng) {
        std::vector<int64_t> counts(u, 0);
        ++counts[target_sampler.Sample(rng)];
        AddDraws(other_sampler, n - 1, rng, counts);
        return target == Target::kPosition
                   ? PositionPosteriorDivergence(counts, ratios)
                   : MessagePosteriorDivergence(counts, ratios, a.first);
      },
      options);
}

}  // namespace

absl::StatusOr<EstimatorResult> McIKZ(const Categorical& p,
                                      const Categorical& q, int n,
                                      const McOptions& options) {
  return BasicEstimate(p, q, n, options, Target::kPosition);
}

absl::StatusOr<EstimatorResult> McIY1Z(const Categorical& p,
                                       const Categorical& q, int n,
                                       const McOptions& options) {
  return BasicEstimate(p, q, n, options, Target::kMessage);
}

absl::StatusOr<EstimatorResult> McIX1ZIid(const Randomizer& r,
                                          const Categorical& prior, int n,
                                          const McOptions& options) {
  if (absl::Status s = CheckUsers(n); !s.ok()) return s;
  absl::StatusOr<std::vector<double>> weights =
      ProjectOnto(prior, r.input_labels());
  if (!weights.ok()) return weights.status();
  absl::StatusOr<Categorical> marginal = OutputMarginal(r, prior);
  if (!marginal.ok()) return marginal.status();
  const std::vector<double>& q = marginal->probs();
  const size_t k = r.num_inputs();
  const size_t d = r.num_outputs();
  for (size_t y = 0; y < d; ++y) {
    if (q[y] > 0.0) continue;
    for (size_t x = 0; x < k; ++x) {
      if (r.kernel()[x][y] > 0.0) {
        return absl::InvalidArgumentError(absl::StrCat(
            "output '", r.output_labels()[y], "' is possible under input '",
            r.input_labels()[x], "' but has no mass in the output marginal"));
      }
    }
  }
  // ratio[x][y] = R_x(y) / Q(y).
  std::vector<std::vector<double>> ratio(k, std::vector<double>(d, 0.0));
  for (size_t x = 0; x < k; ++x) {
    for (size_t y = 0; y < d; ++y) {
      if (q[y] > 0.0) ratio[x][y] = r.kernel()[x][y] / q[y];
    }
  }
  const DiscreteSampler input_sampler(*weights);
  std::vector<DiscreteSampler> row_samplers;
  for (size_t x = 0; x < k; ++x) row_samplers.emplace_back(r.kernel()[x]);
  const DiscreteSampler other_sampler(q);
  const std::vector<double>& prior_w = *weights;

  return EstimateMean(
      [&](Rng& rng) {
        std::vector<int64_t> counts(d, 0);
        const size_t x1 = input_sampler.Sample(rng);
        ++counts[row_samplers[x1].Sample(rng)];
        AddDraws(other_sampler, n - 1, rng, counts);
        std::vector<double> posterior(k, 0.0);
        CompensatedSum norm;
        for (size_t x = 0; x < k; ++x) {
          if (prior_w[x] <= 0.0) continue;
          double score = 0.0;
          for (size_t y = 0; y < d; ++y) {
            if (counts[y] > 0) {
              score += static_cast<double>(counts[y]) * ratio[x][y];
            }
          }
          posterior[x] = prior_w[x] * score;
          norm.Add(posterior[x]);
        }
        const double total = norm.Total();
        CompensatedSum kl;
        for (size_t x = 0; x < k; ++x) {
          if (posterior[x] <= 0.0) continue;
          const double post = posterior[x] / total;
          kl.Add(post * std::log(post / prior_w[x]));
        }
        return std::max(kl.Total(), 0.0);
      },
      options);
}

}  // namespace shuffle_leakage
