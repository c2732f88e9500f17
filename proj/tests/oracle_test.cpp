// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dkmips/oracle.hpp"
#include "dkmips/synthetic.hpp"
#include "dkmips/verify.hpp"
#include "test_util.hpp"

namespace dkmips {
namespace {

using testing::direct_f;
using testing::toy_items;
using testing::toy_params;
using testing::toy_query;

TEST(BinomialTest, SmallValues) {
  EXPECT_EQ(binomial(5, 2), 10.0);
  EXPECT_EQ(binomial(10, 0), 1.0);
  EXPECT_EQ(binomial(3, 4), 0.0);
  EXPECT_GT(binomial(50, 10), kMaxSubsets);
}

TEST(BruteForceTest, ToyMaxPairIsOrthogonal) {
  SearchParams p = toy_params(Mode::kMax);
  p.k = 2;
  const auto r = brute_force_opt(toy_items(), toy_query(), p);
  EXPECT_EQ(r.optimal, (std::vector<ItemId>{2, 3}));
  EXPECT_NEAR(r.optimal_value, 0.5, 1e-12);
  // mu(1-lambda) * max pair <p1,p3> = 1/6 * 2
  EXPECT_NEAR(r.div_star_max, 1.0 / 3, 1e-12);
}

TEST(BruteForceTest, GuardRefusesHugeEnumerations) {
  std::mt19937_64 rng(1);
  const auto items = synthetic::uniform_items(50, 2, rng);
  const auto q = synthetic::uniform_query(2, rng);
  EXPECT_THROW(brute_force_opt(items, q, {10, 0.5, 0.1, Mode::kAvg}),
               GuardError);
  EXPECT_THROW(brute_force_opt(toy_items(), toy_query(), {5, 0.5, 0.1, Mode::kAvg}),
               ParamError);
}

TEST(BruteForceTest, OptimumBeatsEverySolver) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 4 + rng() % 7;
    const auto items = synthetic::uniform_items(n, 1 + rng() % 5, rng);
    const auto q = synthetic::uniform_query(items.dim(), rng);
    for (Mode m : {Mode::kAvg, Mode::kMax}) {
      const SearchParams p{2 + rng() % 2, 0.5, 0.5, m};
      const auto opt = brute_force_opt(items, q, p);
      EXPECT_NEAR(opt.optimal_value, direct_f(items, opt.optimal, q, p), 1e-12);
      EXPECT_GE(opt.optimal_value + 1e-12, greedy(items, q, p).objective);
      EXPECT_GE(opt.optimal_value + 1e-12, linear_topk(items, q, p).objective);
    }
  }
}

TEST(ScorerTest, AgreesWithObjectiveModule) {
  std::mt19937_64 rng(3);
  const auto items = synthetic::uniform_items(30, 4, rng);
  const auto q = synthetic::uniform_query(4, rng);
  for (Mode m : {Mode::kAvg, Mode::kMax}) {
    const SearchParams p{6, 0.4, 0.3, m};
    const SubsetScorer s(items, q, p);
    const std::vector<ItemId> set{3, 9, 14, 20, 29};
    EXPECT_NEAR(s.value(set), eval_f(items, set, q, p), 1e-12);
  }
}

TEST(NaiveFindBestTest, ToyMaxAfterFirstItem) {
  const std::vector<ItemId> s{0};
  const Candidate c =
      naive_find_best(toy_items(), toy_query(), s, toy_params(Mode::kMax));
  EXPECT_EQ(c.id, 1u);
  EXPECT_NEAR(c.gain, -1.0 / 12, 1e-12);
}

TEST(CheckTest, DualRatioRejectsMaxMode) {
  EXPECT_THROW(check_dualgreedy_ratio(toy_items(), toy_query(),
                                      toy_params(Mode::kMax)),
               ParamError);
}

TEST(CheckTest, GreedyBoundSkipsNonPositiveTopk) {
  SearchParams p = toy_params(Mode::kAvg);
  p.lambda = 0.0;
  EXPECT_EQ(check_greedy_datadep(toy_items(), toy_query(), p).verdict,
            Verdict::kSkipped);
}

TEST(SuiteTest, SmallSweepsPass) {
  OracleSweep s;
  s.count = 40;
  EXPECT_TRUE(suite_dual_ratio(s, 5).passed());
  EXPECT_TRUE(suite_greedy_bound(s, Mode::kAvg, 6).passed());
  EXPECT_TRUE(suite_greedy_bound(s, Mode::kMax, 7).passed());
  EXPECT_TRUE(suite_submodularity(200, 20, 8, 8).passed());
}

TEST(SuiteTest, VerifyGuard) {
  VerifyConfig c;
  c.n = 50;
  c.k = 10;
  EXPECT_THROW(check_verify_guard(c), GuardError);
  c.n = 10;
  c.k = 3;
  EXPECT_NO_THROW(check_verify_guard(c));
}

}  // namespace
}  // namespace dkmips
