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
#include <map>
#include <random>
#include <vector>

#include "absl/status/status.h"
#include "brute_force.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "shuffle_leakage/mechanisms.h"
#include "shuffle_leakage/rng.h"

namespace shuffle_leakage {
namespace {

using ::testing::DoubleNear;
using ::testing::Each;
using ::testing::ElementsAre;
using ::testing::Pointwise;

Categorical Make(std::vector<Label> labels, std::vector<double> probs) {
  absl::StatusOr<Categorical> d =
      Categorical::Create(std::move(labels), std::move(probs));
  EXPECT_TRUE(d.ok()) << d.status();
  return *d;
}

double ChiSquareCritical99(int df) {
  const double z = 2.326347874;
  const double h = 2.0 / (9.0 * df);
  return df * std::pow(1 - h + z * std::sqrt(h), 3);
}

double ChiSquareUniform(const std::vector<int>& counts) {
  double total = 0;
  for (int c : counts) total += c;
  const double expected = total / counts.size();
  double stat = 0.0;
  for (int c : counts) stat += (c - expected) * (c - expected) / expected;
  return stat;
}

TEST(SampleShuffleOnlyTest, SingleUser) {
  Rng rng(1);
  ShuffleSample s = *SampleShuffleOnly(*MakeZipf(4, 0.7), *MakeUniform(4), 1, rng);
  EXPECT_EQ(s.k_true, 1);
  EXPECT_THAT(s.z, ElementsAre(s.y1));
  EXPECT_FALSE(s.x_inputs.has_value());
}

TEST(SampleShuffleOnlyTest, PointMassGivesConstantOutput) {
  Rng rng(2);
  Categorical point = MakePointMass("a");
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 20000; ++i) {
    ShuffleSample s = *SampleShuffleOnly(point, point, 5, rng);
    EXPECT_THAT(s.z, Each("a"));
    ++counts[s.k_true - 1];
  }
  EXPECT_LT(ChiSquareUniform(counts), ChiSquareCritical99(4));
}

TEST(SampleShuffleOnlyTest, TargetPositionIsUniform) {
  Rng rng(3);
  Categorical p = Make({"a", "b"}, {0.9, 0.1});
  Categorical q = Make({"a", "b", "c"}, {0.1, 0.3, 0.6});
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 100000; ++i) {
    ShuffleSample s = *SampleShuffleOnly(p, q, 7, rng);
    ASSERT_EQ(s.z.size(), 7u);
    ASSERT_EQ(s.z[s.k_true - 1], s.y1);
    ++counts[s.k_true - 1];
  }
  EXPECT_LT(ChiSquareUniform(counts), ChiSquareCritical99(6));
}

TEST(SampleShuffleOnlyTest, RejectsNonPositiveUsers) {
  Rng rng(1);
  EXPECT_EQ(SampleShuffleOnly(*MakeUniform(2), *MakeUniform(2), 0, rng)
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(PosteriorKTest, EqualDistributionsGiveUniform) {
  Categorical p = *MakeZipf(3, 1.0);
  std::vector<Label> z = {"1", "3", "3", "2"};
  EXPECT_THAT(*PosteriorK(z, p, p), Each(DoubleNear(0.25, 1e-15)));
}

TEST(PosteriorKTest, Examples) {
  Categorical p = Make({"a", "b"}, {1, 0});
  Categorical q = Make({"a", "b"}, {0.5, 0.5});
  std::vector<Label> z = {"a", "b"};
  EXPECT_THAT(*PosteriorK(z, p, q), ElementsAre(1.0, 0.0));

  Categorical p2 = Make({"a", "b"}, {0.8, 0.2});
  std::vector<Label> z2 = {"a", "a", "b"};
  EXPECT_THAT(*PosteriorK(z2, p2, q),
              Pointwise(DoubleNear(1e-15),
                        std::vector<double>{1.6 / 3.6, 1.6 / 3.6, 0.4 / 3.6}));
}

TEST(PosteriorKTest, InfiniteRatioSplitsUniformly) {
  Categorical p = Make({"a", "b"}, {0.5, 0.5});
  Categorical q = Make({"a", "b"}, {1.0, 0.0});
  std::vector<Label> z = {"a", "b", "a"};
  EXPECT_THAT(*PosteriorK(z, p, q), ElementsAre(0.0, 1.0, 0.0));
}

TEST(PosteriorKTest, Errors) {
  Categorical p = Make({"a", "b", "c"}, {0.5, 0.5, 0.0});
  Categorical q = Make({"a", "b", "c"}, {0.5, 0.5, 0.0});
  std::vector<Label> z = {"a", "c"};
  EXPECT_EQ(PosteriorK(z, p, q).status().code(),
            absl::StatusCode::kInvalidArgument);
  std::vector<Label> unknown = {"a", "zzz"};
  EXPECT_EQ(PosteriorK(unknown, p, q).status().code(),
            absl::StatusCode::kInvalidArgument);
  // Every position has zero weight: unreachable under the model.
  Categorical p0 = Make({"a", "b"}, {0.0, 1.0});
  Categorical q0 = Make({"a", "b"}, {1.0, 0.0});
  std::vector<Label> all_a = {"a", "a"};
  EXPECT_EQ(PosteriorK(all_a, p0, q0).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(PosteriorK({}, p, q).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(PosteriorKTest, MatchesBruteForceBayes) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<Label> labels = {"a", "b", "c"};
  for (int trial = 0; trial < 20; ++trial) {
    brute::Row p(3), q(3);
    for (int i = 0; i < 3; ++i) {
      p[i] = u(gen) < 0.2 ? 0.0 : u(gen);
      q[i] = u(gen) + 0.05;
    }
    p[trial % 3] += 0.2;
    double sp = p[0] + p[1] + p[2], sq = q[0] + q[1] + q[2];
    for (int i = 0; i < 3; ++i) p[i] /= sp, q[i] /= sq;
    Categorical cp = Make(labels, p), cq = Make(labels, q);
    for (const brute::Seq& seq : brute::AllSequences(3, 3)) {
      std::vector<Label> z;
      bool possible = false;
      for (int s : seq) {
        z.push_back(labels[s]);
        possible |= p[s] > 0;
      }
      if (!possible) continue;
      EXPECT_THAT(*PosteriorK(z, cp, cq),
                  Pointwise(DoubleNear(1e-12), brute::PosteriorK(p, q, seq)));
    }
  }
}

TEST(PosteriorKTest, ExchangeableUnderPermutation) {
  Categorical p = Make({"a", "b", "c"}, {0.5, 0.3, 0.2});
  Categorical q = Make({"a", "b", "c"}, {0.2, 0.3, 0.5});
  std::vector<Label> z = {"a", "b", "c", "a", "c"};
  std::vector<double> post = *PosteriorK(z, p, q);
  Categorical y1 = *PosteriorY1(z, p, q);
  std::vector<int> perm = {4, 2, 0, 3, 1};
  std::vector<Label> zp;
  for (int i : perm) zp.push_back(z[i]);
  std::vector<double> post_p = *PosteriorK(zp, p, q);
  for (size_t i = 0; i < perm.size(); ++i) {
    EXPECT_NEAR(post_p[i], post[perm[i]], 1e-15);
  }
  Categorical y1p = *PosteriorY1(zp, p, q);
  for (const char* l : {"a", "b", "c"}) {
    EXPECT_NEAR(y1p.Prob(l), y1.Prob(l), 1e-15);
  }
  double total = 0;
  for (double v : post) total += v;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(PosteriorY1Test, Examples) {
  Categorical q = Make({"a", "b"}, {0.5, 0.5});
  std::vector<Label> z = {"a", "a", "b"};
  Categorical post = *PosteriorY1(z, q, q);
  EXPECT_NEAR(post.Prob("a"), 2.0 / 3, 1e-15);
  EXPECT_NEAR(post.Prob("b"), 1.0 / 3, 1e-15);

  std::vector<Label> all_a = {"a", "a", "a"};
  EXPECT_EQ(PosteriorY1(all_a, q, q)->Prob("a"), 1.0);

  Categorical p = Make({"a", "b"}, {0.8, 0.2});
  post = *PosteriorY1(z, p, q);
  EXPECT_NEAR(post.Prob("a"), 3.2 / 3.6, 1e-15);
  EXPECT_NEAR(post.Prob("b"), 0.4 / 3.6, 1e-15);
}

TEST(SampleShuffleDpTest, DeterministicKernelShufflesInputs) {
  Randomizer identity = *Randomizer::Create(
      {"1", "2", "3"}, {"1", "2", "3"}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  Rng rng(4);
  std::vector<Label> x = {"2", "1", "3", "3"};
  for (int i = 0; i < 100; ++i) {
    ShuffleSample s = *SampleShuffleDp(identity, x, rng);
    std::vector<Label> sorted_z = s.z;
    std::sort(sorted_z.begin(), sorted_z.end());
    EXPECT_THAT(sorted_z, ElementsAre("1", "2", "3", "3"));
    EXPECT_EQ(s.z[s.k_true - 1], "2");
    EXPECT_EQ(*s.x_inputs, x);
  }
}

TEST(SampleShuffleDpTest, SlotMarginalIsKernelRow) {
  Randomizer r = *MakeKrr(2, std::log(3.0));
  Rng rng(5);
  std::vector<Label> x = {"1", "1"};
  const int trials = 100000;
  std::vector<int> ones(2, 0);
  for (int i = 0; i < trials; ++i) {
    ShuffleSample s = *SampleShuffleDp(r, x, rng);
    for (int slot = 0; slot < 2; ++slot) ones[slot] += s.z[slot] == "1";
  }
  const double sd = std::sqrt(trials * 0.75 * 0.25);
  for (int slot = 0; slot < 2; ++slot) {
    EXPECT_NEAR(ones[slot], 0.75 * trials, 4 * sd);
  }
}

TEST(SampleShuffleDpTest, JointMatchesPermutationLikelihood) {
  Randomizer r = *MakeKrr(2, std::log(3.0));
  std::vector<Label> x = {"1", "2", "2"};
  std::vector<brute::Row> rows = {r.kernel()[0], r.kernel()[1], r.kernel()[1]};
  std::map<std::pair<int, brute::Seq>, double> law = brute::PositionJoint(rows);
  std::map<std::pair<int, brute::Seq>, int> counts;
  Rng rng(6);
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) {
    ShuffleSample s = *SampleShuffleDp(r, x, rng);
    brute::Seq z;
    for (const Label& l : s.z) z.push_back(l == "1" ? 0 : 1);
    ++counts[{s.k_true - 1, z}];
  }
  double stat = 0.0;
  for (const auto& [key, mass] : law) {
    const double expected = trials * mass;
    stat += (counts[key] - expected) * (counts[key] - expected) / expected;
  }
  EXPECT_LT(stat, ChiSquareCritical99(static_cast<int>(law.size()) - 1));
}

TEST(SampleShuffleDpTest, RejectsUnknownInput) {
  Rng rng(1);
  std::vector<Label> x = {"1", "9"};
  EXPECT_EQ(SampleShuffleDp(*MakeKrr(2, 1.0), x, rng).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(PosteriorX1Fact1Test, EqualRowsReturnPrior) {
  Randomizer r = *Randomizer::Create({"1", "2", "3"}, {"a", "b"},
                                     {{0.4, 0.6}, {0.4, 0.6}, {0.4, 0.6}});
  Categorical prior = Make({"1", "2", "3"}, {0.2, 0.3, 0.5});
  Categorical q = Make({"a", "b"}, {0.4, 0.6});
  std::vector<Label> msgs = {"a", "b", "b", "a", "b"};
  Categorical post =
      *PosteriorX1Fact1(Histogram::FromMessages(msgs), prior, r, q);
  EXPECT_THAT(post.probs(), Pointwise(DoubleNear(1e-15), prior.probs()));
}

TEST(PosteriorX1Fact1Test, SingleCellHistogram) {
  Randomizer r = *MakeKrr(2, std::log(3.0));
  Categorical prior = *MakeUniform(2);
  Categorical q = *MakeUniform(2);
  std::vector<Label> msgs = {"1", "1"};
  Categorical post =
      *PosteriorX1Fact1(Histogram::FromMessages(msgs), prior, r, q);
  EXPECT_THAT(post.probs(),
              Pointwise(DoubleNear(1e-15), std::vector<double>{0.75, 0.25}));

  Randomizer r4 = *MakeKrr(4, 1.0);
  Categorical skewed = Make({"1", "2", "3", "4"}, {0.1, 0.2, 0.3, 0.4});
  std::vector<Label> threes = {"3", "3", "3", "3"};
  Categorical post4 = *PosteriorX1Fact1(Histogram::FromMessages(threes),
                                        skewed, r4, *MakeUniform(4));
  double total = 0.0;
  std::vector<double> bayes;
  for (int x = 0; x < 4; ++x) {
    bayes.push_back(skewed.probs()[x] * r4.kernel()[x][2]);
    total += bayes.back();
  }
  for (double& v : bayes) v /= total;
  EXPECT_THAT(post4.probs(), Pointwise(DoubleNear(1e-15), bayes));
}

TEST(PosteriorX1Fact1Test, Errors) {
  Randomizer r = *MakeKrr(2, 1.0);
  Categorical prior = *MakeUniform(2);
  Categorical q = Make({"1", "2"}, {1.0, 0.0});
  std::vector<Label> msgs = {"2"};
  EXPECT_EQ(PosteriorX1Fact1(Histogram::FromMessages(msgs), prior, r, q)
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(HistogramTest, CountsMessages) {
  std::vector<Label> msgs = {"b", "a", "b"};
  Histogram h = Histogram::FromMessages(msgs);
  EXPECT_EQ(h.total, 3);
  EXPECT_EQ(h.Count("b"), 2);
  EXPECT_EQ(h.Count("z"), 0);
}

}  // namespace
}  // namespace shuffle_leakage
