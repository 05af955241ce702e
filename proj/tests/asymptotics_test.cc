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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "absl/status/status.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "shuffle_leakage/exact_oracle.h"
#include "shuffle_leakage/mechanisms.h"
#include "shuffle_leakage/probability.h"

namespace shuffle_leakage {
namespace {

using ::testing::DoubleNear;
using ::testing::Pointwise;

Categorical Make(std::vector<Label> labels, std::vector<double> probs) {
  absl::StatusOr<Categorical> d =
      Categorical::Create(std::move(labels), std::move(probs));
  EXPECT_TRUE(d.ok()) << d.status();
  return *d;
}

std::vector<double> Normalized(std::vector<double> v) {
  double total = 0;
  for (double x : v) total += x;
  for (double& x : v) x /= total;
  return v;
}

TEST(AsymIY1PeqQTest, Examples) {
  EXPECT_EQ(*AsymIY1PeqQ(1, 50), 0.0);
  EXPECT_NEAR(*AsymIY1PeqQ(4, 100), 0.015, 1e-15);
  EXPECT_EQ(*AsymIY1PeqQ(2, 2), 0.25);
  const double gap2 = std::abs(*ClosedFormIY1PeqQ(*MakeUniform(2), 2) - 0.25);
  const double gap20 =
      std::abs(*ClosedFormIY1PeqQ(*MakeUniform(2), 20) - *AsymIY1PeqQ(2, 20));
  EXPECT_NEAR(gap2, std::log(2.0) / 2 - 0.25, 1e-15);
  EXPECT_LT(gap20, gap2);
  EXPECT_EQ(AsymIY1PeqQ(0, 5).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(AsymIKTest, Examples) {
  Categorical zipf = *MakeZipf(4, 0.7);
  AsymptoticTerm same = *AsymIK(zipf, zipf);
  EXPECT_EQ(same.constant_term, 0.0);
  EXPECT_EQ(same.log_n_coefficient, 0.0);
  EXPECT_EQ(same.inv_n_coefficient, 0.0);

  AsymptoticTerm disjoint =
      *AsymIK(Make({"a", "b"}, {1, 0}), Make({"a", "b"}, {0, 1}));
  EXPECT_EQ(disjoint.log_n_coefficient, 1.0);
  EXPECT_EQ(disjoint.constant_term, 0.0);
  EXPECT_EQ(disjoint.inv_n_coefficient, 0.0);
  EXPECT_NEAR(disjoint.Evaluate(37), std::log(37.0), 1e-15);

  Categorical u4 = *MakeUniform(4);
  AsymptoticTerm t = *AsymIK(zipf, u4);
  EXPECT_NEAR(t.constant_term, *KlDivergence(zipf, u4), 1e-15);
  EXPECT_NEAR(t.inv_n_coefficient, -*Chi2Divergence(zipf, u4) / 2, 1e-15);
  EXPECT_EQ(t.log_n_coefficient, 0.0);
  EXPECT_EQ(t.remainder_order, "n^-3/2");
}

TEST(AsymIKTest, AbsolutelyContinuousCaseCollapses) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Categorical p = Make({"a", "b", "c"}, Normalized({u(gen), u(gen), u(gen)}));
    Categorical q = Make({"a", "b", "c"}, Normalized({u(gen), u(gen), u(gen)}));
    const int n = 10 + trial;
    EXPECT_NEAR(AsymIK(p, q)->Evaluate(n),
                *KlDivergence(p, q) - *Chi2Divergence(p, q) / (2.0 * n), 1e-15);
  }
}

TEST(AsymIKTest, PartialSupport) {
  Categorical p = Make({"a", "b", "c"}, {0.5, 0.3, 0.2});
  Categorical q = Make({"a", "b", "c"}, {0.6, 0.4, 0.0});
  Categorical restricted = Make({"a", "b"}, {0.625, 0.375});
  AsymptoticTerm t = *AsymIK(p, q);
  EXPECT_NEAR(t.log_n_coefficient, 0.2, 1e-15);
  EXPECT_NEAR(t.constant_term, 0.8 * *KlDivergence(restricted, q), 1e-15);
  EXPECT_NEAR(t.inv_n_coefficient, -0.8 * *Chi2Divergence(restricted, q) / 2,
              1e-15);
}

TEST(AsymIY1Test, Examples) {
  for (int m = 2; m <= 5; ++m) {
    AsymptoticTerm t = *AsymIY1(*MakeUniform(m), *MakeUniform(m));
    EXPECT_NEAR(t.inv_n_coefficient, (m - 1) / 2.0, 1e-14);
    EXPECT_EQ(t.constant_term, 0.0);
  }
  Categorical p = Make({"a", "b", "c"}, {0.3, 0.7, 0.0});
  Categorical q = Make({"a", "b", "c"}, {0.0, 0.0, 1.0});
  AsymptoticTerm disjoint = *AsymIY1(p, q);
  EXPECT_NEAR(disjoint.constant_term, Entropy(p), 1e-15);
  EXPECT_EQ(disjoint.inv_n_coefficient, 0.0);

  Categorical zipf = *MakeZipf(4, 0.7);
  double c1 = 0.0;
  for (double pi : zipf.probs()) c1 += 4 * (pi - pi * pi);
  EXPECT_NEAR(AsymIY1(zipf, *MakeUniform(4))->inv_n_coefficient, c1 / 2,
              1e-14);
  EXPECT_NEAR(*MessageLeakageConstant(zipf, zipf), 3.0, 1e-14);
}

TEST(AsymIY1Test, PartialSupportConstantAndRate) {
  Categorical p = Make({"a", "b", "c"}, {0.5, 0.3, 0.2});
  Categorical q = Make({"a", "b", "c"}, {0.6, 0.4, 0.0});
  AsymptoticTerm t = *AsymIY1(p, q);
  const double constant = 0.2 * std::log(1 / 0.2) + 0.8 * std::log(1 / 0.8);
  const double rate = 0.8 *
                      (0.625 * 0.375 / 0.6 + 0.375 * 0.625 / 0.4) / 2;
  EXPECT_NEAR(t.constant_term, constant, 1e-15);
  EXPECT_NEAR(t.inv_n_coefficient, rate, 1e-15);
  EXPECT_NEAR(*ExactIY1Z(p, q, 1000), t.Evaluate(1000), 1e-5);
}

TEST(OptimalQTest, Examples) {
  Categorical two = Make({"a", "b", "c"}, {0.9, 0.0, 0.1});
  Categorical q = *OptimalQ(two);
  EXPECT_NEAR(q.Prob("a"), 0.5, 1e-15);
  EXPECT_NEAR(q.Prob("c"), 0.5, 1e-15);
  EXPECT_EQ(q.Prob("b"), 0.0);

  EXPECT_THAT(OptimalQ(*MakeUniform(5))->probs(),
              Pointwise(DoubleNear(1e-15), MakeUniform(5)->probs()));

  Categorical zipf = *MakeZipf(4, 0.7);
  double root_sum = 0.0;
  for (double p : zipf.probs()) root_sum += std::sqrt(p * (1 - p));
  EXPECT_NEAR(OptimalQConstant(zipf), root_sum * root_sum, 1e-14);
  EXPECT_NEAR(OptimalQConstant(zipf), 2.81, 0.01);
  EXPECT_NEAR(*MessageLeakageConstant(zipf, *OptimalQ(zipf)),
              OptimalQConstant(zipf), 1e-13);

  EXPECT_EQ(OptimalQ(MakePointMass("a")).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(OptimalQTest, PerturbationsIncreaseConstant) {
  Categorical zipf = *MakeZipf(4, 0.7);
  Categorical best = *OptimalQ(zipf);
  const double c = *MessageLeakageConstant(zipf, best);
  std::mt19937_64 gen(2);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> q = best.probs();
    for (double& v : q) v = std::max(1e-12, v + 1e-3 * normal(gen));
    Categorical perturbed = Make(best.labels(), Normalized(q));
    EXPECT_GT(*MessageLeakageConstant(zipf, perturbed), c) << trial;
  }
}

TEST(BoundsTest, Examples) {
  EXPECT_EQ(*BoundIKDp(0.0), 0.0);
  EXPECT_NEAR(*BoundIKDp(std::log(3.0)), 2 * std::log(3.0), 1e-15);
  EXPECT_EQ(BoundIKDp(-1.0).status().code(),
            absl::StatusCode::kInvalidArgument);

  EXPECT_EQ(*BoundIXDp(0.0, 10), 0.0);
  EXPECT_NEAR(*BoundIXDp(1.0, 64), (std::exp(1.0) - 1) / 128, 1e-17);
  EXPECT_EQ(BoundIXDp(1.0, 0).status().code(),
            absl::StatusCode::kInvalidArgument);

  EXPECT_NEAR(*CloneBoundIY1(4, 0.0, 10), 3.0 / 20, 1e-16);
  EXPECT_EQ(*CloneBoundIY1(1, 2.0, 10), 0.0);
  EXPECT_NEAR(*CloneBoundIY1(4, 1.0, 64), 3 * std::exp(1.0) / 128, 1e-16);
}

TEST(LemmaRateTest, Examples) {
  Categorical q = Make({"a", "b"}, {0.4, 0.6});
  Randomizer same = *Randomizer::Create({"1", "2"}, {"a", "b"},
                                        {{0.4, 0.6}, {0.4, 0.6}});
  EXPECT_EQ(*LemmaRate(*MakeUniform(2), same, q, 10), 0.0);

  for (int k : {2, 4, 6}) {
    for (double eps0 : {0.5, 1.0, 2.0}) {
      const double e = std::exp(eps0);
      Randomizer r = *MakeKrr(k, eps0);
      Categorical bar = BlanketOfRandomizer(r)->generalized_blanket;
      Categorical prior = *MakeUniform(k);
      EXPECT_NEAR(*MeanRowChi2(prior, r, bar), e * (e - 1) / (e + k - 1),
                  1e-13);
      EXPECT_NEAR(*BlanketBoundIX(prior, r, 50),
                  e * (e - 1) / (e + k - 1) / 100, 1e-15);
      const int s = 9;
      EXPECT_NEAR(*LemmaRate(prior, r, *MakeUniform(k), s),
                  (k - 1) * (e - 1) * (e - 1) /
                      ((e + k - 1) * (e + k - 1) * 2 * (s + 1)),
                  1e-15);
    }
  }
}

TEST(LemmaRateTest, UnifiedBoundDominatesBlanketRate) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int inputs = 2 + trial % 3, outputs = 2 + trial % 4;
    const double eps0 = 0.1 + 1.9 * u(gen);
    std::vector<std::vector<double>> kernel(inputs,
                                            std::vector<double>(outputs));
    for (int y = 0; y < outputs; ++y) {
      const double scale = 0.2 + u(gen);
      for (int x = 0; x < inputs; ++x) {
        kernel[x][y] = scale * std::exp(eps0 * u(gen) / 2);
      }
    }
    std::vector<Label> in, out;
    for (int x = 0; x < inputs; ++x) {
      kernel[x] = Normalized(kernel[x]);
      in.push_back(std::to_string(x));
    }
    for (int y = 0; y < outputs; ++y) out.push_back(std::to_string(y));
    Randomizer r = *Randomizer::Create(in, out, kernel);
    std::vector<double> prior_w(inputs);
    for (double& v : prior_w) v = 0.1 + u(gen);
    Categorical prior = Make(in, Normalized(prior_w));
    Categorical bar = BlanketOfRandomizer(r)->generalized_blanket;
    for (int n : {2, 10, 100}) {
      EXPECT_LE(*LemmaRate(prior, r, bar, n - 1),
                *BoundIXDp(LdpEpsilon(r), n) + 1e-15);
    }
  }
}

TEST(RateTest, ScaledRemainderHasNoGrowthTrend) {
  Categorical u4 = *MakeUniform(4);
  std::vector<double> scaled;
  for (int n = 32; n <= 4096; n *= 2) {
    const double e = std::abs(*ClosedFormIY1PeqQ(u4, n) - 3.0 / (2 * n));
    scaled.push_back(e * std::pow(n, 1.5));
  }
  std::vector<double> head(scaled.begin(), scaled.begin() + 3);
  std::sort(head.begin(), head.end());
  for (double v : scaled) EXPECT_LE(v, 2 * head[1]);
}

}  // namespace
}  // namespace shuffle_leakage
