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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dkmips/objective.hpp"
#include "dkmips/synthetic.hpp"
#include "test_util.hpp"

namespace dkmips {
namespace {

using testing::direct_f;
using testing::toy_items;
using testing::toy_params;
using testing::toy_query;

constexpr double kTight = 1e-12;

TEST(ObjectiveTest, ToyAvgAndMaxValues) {
  const auto items = toy_items();
  const auto q = toy_query();
  const std::vector<ItemId> s{0, 1, 2};
  EXPECT_NEAR(eval_f_avg(items, s, q, toy_params(Mode::kAvg)), 5.0 / 36, kTight);
  EXPECT_NEAR(eval_f_max(items, s, q, toy_params(Mode::kMax)), 1.0 / 12, kTight);
  const std::vector<ItemId> orth{2, 3};
  EXPECT_NEAR(eval_f_max(items, orth, q, toy_params(Mode::kMax)), 1.0 / 3,
              kTight);
}

TEST(ObjectiveTest, SingletonIsRelevanceOnly) {
  const auto items = toy_items();
  const auto q = toy_query();
  SearchParams p = toy_params(Mode::kAvg);
  p.lambda = 1.0;
  const std::vector<ItemId> s{0};
  EXPECT_NEAR(eval_f_avg(items, s, q, p), 1.0 / 3, kTight);
  p.mode = Mode::kMax;
  p.lambda = 0.5;
  EXPECT_NEAR(eval_f_max(items, s, q, p), 0.5 / 3, kTight);
  EXPECT_DOUBLE_EQ(eval_f(items, std::vector<ItemId>{}, q, p), 0.0);
}

TEST(ObjectiveTest, LambdaZeroIsNegatedDiversity) {
  const auto items = toy_items();
  const auto q = toy_query();
  SearchParams p = toy_params(Mode::kAvg);
  p.lambda = 0.0;
  const std::vector<ItemId> s{0, 1};
  // -2 mu/(k(k-1)) <p1,p2> = -2/3/6 * 1
  EXPECT_NEAR(eval_f_avg(items, s, q, p), -1.0 / 9, kTight);
}

TEST(ObjectiveTest, InvalidIdsAndParams) {
  const auto items = toy_items();
  const auto q = toy_query();
  const auto p = toy_params(Mode::kAvg);
  EXPECT_THROW(eval_f(items, std::vector<ItemId>{0, 9}, q, p), LogicError);
  EXPECT_THROW(eval_f(items, std::vector<ItemId>{1, 1}, q, p), LogicError);
  SearchParams k1 = p;
  k1.k = 1;
  EXPECT_THROW(eval_f_avg(items, std::vector<ItemId>{0, 1}, q, k1), ParamError);
  SearchParams bad = p;
  bad.lambda = 1.5;
  EXPECT_THROW(bad.validate(), ParamError);
  bad = p;
  bad.mu = 0.0;
  EXPECT_THROW(bad.validate(), ParamError);
  bad = p;
  bad.k = 0;
  EXPECT_THROW(bad.validate(), ParamError);
}

TEST(MarginalTest, ToyGoldenGains) {
  const auto items = toy_items();
  const auto q = toy_query();
  RelevanceCache rel(items, q);

  DiversityCache avg(items, Mode::kAvg);
  avg.insert(0);
  EXPECT_NEAR(marginal_avg(2, rel(2), toy_params(Mode::kAvg), avg), 1.0 / 18,
              kTight);

  const auto mp = toy_params(Mode::kMax);
  DiversityCache s1(items, Mode::kMax);
  s1.insert(0);
  EXPECT_NEAR(marginal_max(2, rel(2), mp, s1), -1.0 / 6, kTight);
  s1.insert(1);
  EXPECT_NEAR(marginal_max(2, rel(2), mp, s1), 0.0, kTight);
  EXPECT_NEAR(marginal_max(3, rel(3), mp, s1), 0.0, kTight);

  DiversityCache s2(items, Mode::kMax);
  s2.insert(1);
  EXPECT_NEAR(marginal_max(3, rel(3), mp, s2), 1.0 / 6, kTight);
}

TEST(MarginalTest, EmptySetGainIsScaledRelevance) {
  const auto items = toy_items();
  const auto q = toy_query();
  RelevanceCache rel(items, q);
  for (Mode m : {Mode::kAvg, Mode::kMax}) {
    DiversityCache c(items, m);
    for (ItemId p = 0; p < 4; ++p) {
      EXPECT_NEAR(marginal_gain(p, rel(p), toy_params(m), c), 0.5 / 3 * rel(p),
                  kTight);
    }
  }
}

TEST(MarginalTest, MemberAndWrongModeAreLogicErrors) {
  const auto items = toy_items();
  DiversityCache c(items, Mode::kAvg);
  c.insert(0);
  EXPECT_THROW(marginal_avg(0, 1.0, toy_params(Mode::kAvg), c), LogicError);
  EXPECT_THROW(marginal_max(1, 1.0, toy_params(Mode::kMax), c), LogicError);
  EXPECT_THROW(c.insert(0), LogicError);
  EXPECT_THROW(c.insert(7), LogicError);
}

TEST(DiversityCacheTest, ToySumsAndMaxPair) {
  const auto items = toy_items();
  DiversityCache avg(items, Mode::kAvg);
  DiversityCache mx(items, Mode::kMax);
  avg.insert(0);
  mx.insert(0);
  EXPECT_DOUBLE_EQ(mx.max_pair(), 0.0);
  avg.insert(1);
  mx.insert(1);
  EXPECT_DOUBLE_EQ(avg.diversity(2), 4.0);
  EXPECT_DOUBLE_EQ(mx.diversity(2), 2.0);
  EXPECT_DOUBLE_EQ(mx.max_pair(), 1.0);
}

// Random insertion traces: cached gains agree with the direct difference
// f(S + p) - f(S), and gains telescope to f(S).
TEST(DiversityCacheTest, RandomTracesMatchDirectDifferences) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 25;
    const std::size_t d = 1 + rng() % 8;
    const auto items = synthetic::uniform_items(n, d, rng);
    const auto q = synthetic::uniform_query(d, rng);
    for (Mode m : {Mode::kAvg, Mode::kMax}) {
      const SearchParams p{2 + rng() % (n - 1), 0.3, 0.7, m};
      RelevanceCache rel(items, q);
      DiversityCache cache(items, m);
      std::vector<ItemId> order(n);
      std::iota(order.begin(), order.end(), ItemId{0});
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<ItemId> s;
      double sum = 0;
      for (std::size_t i = 0; i < p.k; ++i) {
        const ItemId next = order[i];
        if (trial % 2) cache.sync_all();
        const double g = marginal_gain(next, rel(next), p, cache);
        const double before = direct_f(items, s, q, p);
        s.push_back(next);
        const double after = direct_f(items, s, q, p);
        EXPECT_NEAR(g, after - before, 1e-9 * std::max(1.0, std::abs(g)));
        sum += g;
        cache.insert(next);
      }
      const double f = eval_f(items, s, q, p);
      EXPECT_NEAR(sum, f, 1e-9 * std::max(1.0, std::abs(f)));
      EXPECT_NEAR(f, direct_f(items, s, q, p), 1e-12);
    }
  }
}

TEST(SubmodularityTest, AvgGainsShrinkOnSupersets) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + rng() % 18;
    const auto items = synthetic::uniform_items(n, 1 + rng() % 8, rng);
    const auto q = synthetic::uniform_query(items.dim(), rng);
    const SearchParams p{n, 0.5, 0.5, Mode::kAvg};
    std::vector<ItemId> order(n);
    std::iota(order.begin(), order.end(), ItemId{0});
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t t = rng() % n;
    const std::size_t s = t ? rng() % (t + 1) : 0;
    RelevanceCache rel(items, q);
    DiversityCache cs(items, Mode::kAvg), ct(items, Mode::kAvg);
    for (std::size_t i = 0; i < t; ++i) {
      if (i < s) cs.insert(order[i]);
      ct.insert(order[i]);
    }
    const ItemId x = order[t];
    EXPECT_GE(marginal_avg(x, rel(x), p, cs) - marginal_avg(x, rel(x), p, ct),
              -1e-9);
  }
}

// The max objective is neither submodular nor supermodular on the toy data.
TEST(SubmodularityTest, MaxObjectiveWitness) {
  const auto items = toy_items();
  const auto q = toy_query();
  const auto p = toy_params(Mode::kMax);
  RelevanceCache rel(items, q);
  DiversityCache small(items, Mode::kMax), big(items, Mode::kMax);
  small.insert(0);
  big.insert(0);
  big.insert(1);
  // p3: gain grows with the superset
  EXPECT_LT(marginal_max(2, rel(2), p, small), marginal_max(2, rel(2), p, big));
  DiversityCache s2(items, Mode::kMax);
  s2.insert(1);
  // p4: gain shrinks with the superset
  EXPECT_GT(marginal_max(3, rel(3), p, s2), marginal_max(3, rel(3), p, big));
}

}  // namespace
}  // namespace dkmips
