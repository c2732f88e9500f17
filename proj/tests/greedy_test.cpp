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
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "dkmips/greedy.hpp"
#include "dkmips/synthetic.hpp"
#include "test_util.hpp"

namespace dkmips {
namespace {

using testing::direct_f;
using testing::toy_items;
using testing::toy_params;
using testing::toy_query;

TEST(LinearTopkTest, ToyTiesGoToLowerIds) {
  const auto r = linear_topk(toy_items(), toy_query(), toy_params(Mode::kMax));
  EXPECT_EQ(r.items, (std::vector<ItemId>{0, 2, 3}));
}

TEST(LinearTopkTest, LambdaOneObjectiveIsMeanTopIps) {
  std::mt19937_64 rng(3);
  const auto items = synthetic::uniform_items(50, 5, rng);
  const auto q = synthetic::uniform_query(5, rng);
  const SearchParams p{7, 1.0, 0.2, Mode::kAvg};
  const auto r = linear_topk(items, q, p);
  std::vector<double> ips(items.size());
  for (ItemId i = 0; i < items.size(); ++i) ips[i] = inner_product(items.row(i), q.view());
  std::sort(ips.rbegin(), ips.rend());
  EXPECT_NEAR(r.objective, std::accumulate(ips.begin(), ips.begin() + 7, 0.0) / 7,
              1e-12);
}

TEST(GreedyTest, ToyMaxTrace) {
  const auto r = greedy(toy_items(), toy_query(), toy_params(Mode::kMax));
  EXPECT_EQ(r.items, (std::vector<ItemId>{0, 1, 2}));
  EXPECT_NEAR(r.objective, 1.0 / 12, 1e-12);
  ASSERT_EQ(r.gains.size(), 3u);
  EXPECT_NEAR(r.gains[0], 1.0 / 6, 1e-12);
  EXPECT_NEAR(r.gains[1], -1.0 / 12, 1e-12);
  EXPECT_NEAR(r.gains[2], 0.0, 1e-12);
}

TEST(GreedyTest, KOneIsTopOneMips) {
  std::mt19937_64 rng(5);
  const auto items = synthetic::uniform_items(40, 4, rng);
  const auto q = synthetic::uniform_query(4, rng);
  SearchParams p{1, 0.3, 0.1, Mode::kAvg};
  const auto r = greedy(items, q, p);
  ASSERT_EQ(r.items.size(), 1u);
  EXPECT_EQ(r.items, linear_topk(items, q, p).items);
}

TEST(GreedyTest, ArgumentErrors) {
  const auto items = toy_items();
  SearchParams p = toy_params(Mode::kAvg);
  p.k = 5;
  EXPECT_THROW(greedy(items, toy_query(), p), ParamError);
  EXPECT_THROW(dual_greedy(items, toy_query(), p), ParamError);
  EXPECT_THROW(greedy(items, QueryVector({1, 2, 3}), toy_params(Mode::kAvg)),
               DimensionError);
}

TEST(DualGreedyTest, ToyMaxStopsEarlyWithOrthogonalPair) {
  const auto r = dual_greedy(toy_items(), toy_query(), toy_params(Mode::kMax));
  EXPECT_EQ(r.items, (std::vector<ItemId>{2, 3}));
  EXPECT_NEAR(r.objective, 1.0 / 3, 1e-12);
}

TEST(DualGreedyTest, LambdaZeroYieldsEmptySet) {
  SearchParams p = toy_params(Mode::kAvg);
  p.lambda = 0.0;
  const auto r = dual_greedy(toy_items(), toy_query(), p);
  EXPECT_TRUE(r.items.empty());
  EXPECT_EQ(r.objective, 0.0);
}

// Bookkeeping invariants on random instances for every solver.
TEST(SolverPropertyTest, ObjectiveGainsAndMembership) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 5 + rng() % 80;
    const std::size_t d = 1 + rng() % 10;
    const auto items = synthetic::uniform_items(n, d, rng);
    const auto q = synthetic::uniform_query(d, rng);
    for (Mode m : {Mode::kAvg, Mode::kMax}) {
      const SearchParams p{2 + rng() % std::min<std::size_t>(n - 1, 12),
                           std::uniform_real_distribution<>(0, 1)(rng),
                           std::uniform_real_distribution<>(0.01, 1)(rng), m};
      for (const ResultSet& r :
           {linear_topk(items, q, p), greedy(items, q, p),
            dual_greedy(items, q, p)}) {
        EXPECT_LE(r.items.size(), p.k);
        EXPECT_EQ(std::set<ItemId>(r.items.begin(), r.items.end()).size(),
                  r.items.size());
        const double f = direct_f(items, r.items, q, p);
        EXPECT_NEAR(r.objective, f, 1e-9 * std::max(1.0, std::abs(f)));
        const double sum = std::accumulate(r.gains.begin(), r.gains.end(), 0.0);
        EXPECT_NEAR(sum, f, 1e-9 * std::max(1.0, std::abs(f)));
      }
      EXPECT_EQ(greedy(items, q, p).items.size(), p.k);
    }
  }
}

TEST(SolverPropertyTest, LambdaOneGreedyEqualsTopk) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const auto items = synthetic::uniform_items(60, 6, rng);
    const auto q = synthetic::uniform_query(6, rng);
    for (Mode m : {Mode::kAvg, Mode::kMax}) {
      const SearchParams p{8, 1.0, 0.05, m};
      auto a = greedy(items, q, p).items;
      auto b = linear_topk(items, q, p).items;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      EXPECT_EQ(a, b);
    }
  }
}

}  // namespace
}  // namespace dkmips
