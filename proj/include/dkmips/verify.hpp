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

//
// Randomised property suites over generated non-negative instances.
//
// Each suite draws its instances from a seeded generator and reports how many
// checks ran, failed or were skipped together with the smallest observed
// slack (achieved minus required; negative means a violation).
//

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "dkmips/bctree.hpp"
#include "dkmips/dataset.hpp"
#include "dkmips/error.hpp"
#include "dkmips/greedy.hpp"
#include "dkmips/objective.hpp"
#include "dkmips/oracle.hpp"
#include "dkmips/synthetic.hpp"

namespace dkmips {

struct SuiteReport {
  std::string name;
  std::size_t checked = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::string first_failure;

  bool passed() const { return failed == 0 && checked > 0; }

  void record(double slack, double tol, const std::string& what) {
    ++checked;
    worst_slack = std::min(worst_slack, slack);
    if (slack < -tol) {
      if (failed == 0) first_failure = what;
      ++failed;
    }
  }
};

namespace detail {

inline std::size_t draw(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double draw_real(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <class T>
const T& draw_from(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[draw(rng, 0, v.size() - 1)];
}

// Random subset of {0..n-1} of the given size, in random order.
inline std::vector<ItemId> random_subset(std::mt19937_64& rng, std::size_t n,
                                         std::size_t size) {
  std::vector<ItemId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<ItemId>(i);
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(size);
  return ids;
}

inline std::string describe(std::size_t instance, const SearchParams& p) {
  return "instance " + std::to_string(instance) + " (" +
         std::string(mode_name(p.mode)) + ", k=" + std::to_string(p.k) +
         ", lambda=" + std::to_string(p.lambda) +
         ", mu=" + std::to_string(p.mu) + ")";
}

}  // namespace detail

// S subset T, p outside T: Delta_avg(p,S) - Delta_avg(p,T) >= -1e-9.
inline SuiteReport suite_submodularity(std::size_t count, std::size_t max_n,
                                       std::size_t max_d, std::uint64_t seed) {
  SuiteReport rep;
  rep.name = "submodularity";
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t n = detail::draw(rng, 3, std::max<std::size_t>(3, max_n));
    const std::size_t d = detail::draw(rng, 1, std::max<std::size_t>(1, max_d));
    const ItemMatrix items = synthetic::uniform_items(n, d, rng);
    const QueryVector q = synthetic::uniform_query(d, rng);
    SearchParams params{detail::draw(rng, 2, n), detail::draw_real(rng, 0, 1),
                        detail::draw_real(rng, 0.01, 1.0), Mode::kAvg};

    // T = first t_size of a random order with p after it, S a prefix of T.
    const auto perm = detail::random_subset(rng, n, n);
    const std::size_t t_size = detail::draw(rng, 0, n - 1);
    const std::size_t s_size = detail::draw(rng, 0, t_size);
    const ItemId p = perm[t_size];

    RelevanceCache rel(items, q);
    DiversityCache s_cache(items, Mode::kAvg), t_cache(items, Mode::kAvg);
    for (std::size_t i = 0; i < t_size; ++i) {
      if (i < s_size) s_cache.insert(perm[i]);
      t_cache.insert(perm[i]);
    }
    const double slack = marginal_avg(p, rel(p), params, s_cache) -
                         marginal_avg(p, rel(p), params, t_cache);
    rep.record(slack, kCheckSlack, detail::describe(t, params));
  }
  return rep;
}

struct OracleSweep {
  std::size_t count = 200;
  std::size_t max_n = 10;
  std::vector<std::size_t> ks{2, 3};
  std::vector<double> lambdas{0.1, 0.5, 0.9};
  std::size_t max_d = 8;
};

// Greedy's data-dependent bound, against the exhaustive optimum.
inline SuiteReport suite_greedy_bound(const OracleSweep& sweep, Mode mode,
                                      std::uint64_t seed) {
  SuiteReport rep;
  rep.name = std::string("greedy-bound-") + std::string(mode_name(mode));
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < sweep.count; ++t) {
    const std::size_t k = detail::draw_from(rng, sweep.ks);
    const std::size_t n = detail::draw(rng, k + 1, std::max(k + 1, sweep.max_n));
    const std::size_t d = detail::draw(rng, 1, sweep.max_d);
    const ItemMatrix items = synthetic::uniform_items(n, d, rng);
    const QueryVector q = synthetic::uniform_query(d, rng);
    const SearchParams params{k, detail::draw_from(rng, sweep.lambdas),
                              detail::draw_real(rng, 0.01, 1.0), mode};
    const CheckResult c = check_greedy_datadep(items, q, params);
    if (c.verdict == Verdict::kSkipped) {
      ++rep.skipped;
      continue;
    }
    rep.record(c.slack, kCheckSlack, detail::describe(t, params));
  }
  return rep;
}

// f_avg(DualGreedy) >= 1/4 f_avg(S*) - 3/4 div*_max.
inline SuiteReport suite_dual_ratio(const OracleSweep& sweep,
                                    std::uint64_t seed) {
  SuiteReport rep;
  rep.name = "dual-ratio-avg";
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < sweep.count; ++t) {
    const std::size_t k = detail::draw_from(rng, sweep.ks);
    const std::size_t n = detail::draw(rng, k + 1, std::max(k + 1, sweep.max_n));
    const std::size_t d = detail::draw(rng, 1, sweep.max_d);
    const ItemMatrix items = synthetic::uniform_items(n, d, rng);
    const QueryVector q = synthetic::uniform_query(d, rng);
    const SearchParams params{k, detail::draw_from(rng, sweep.lambdas),
                              detail::draw_real(rng, 0.01, 1.0), Mode::kAvg};
    const CheckResult c = check_dualgreedy_ratio(items, q, params);
    rep.record(c.slack, kCheckSlack, detail::describe(t, params));
  }
  return rep;
}

struct TreeSweep {
  std::size_t builds = 50;
  std::size_t n = 5000;
  std::size_t d = 16;
  std::size_t sets_per_build = 20;
  std::size_t k = 10;
  std::size_t leaf_size = kDefaultLeafSize;
};

// For every leaf item p outside S:
//   Delta(p,S) <= ub_cone <= ub_ball(r_p) <= ub_node (+1e-9 per link).
inline SuiteReport suite_bound_chain(const TreeSweep& sweep,
                                     std::uint64_t seed) {
  SuiteReport rep;
  rep.name = "bound-chain";
  std::mt19937_64 rng(seed);
  for (std::size_t b = 0; b < sweep.builds; ++b) {
    const ItemMatrix items = synthetic::uniform_items(sweep.n, sweep.d, rng);
    const BcTree tree = BcTree::build(items, sweep.leaf_size, rng());
    for (std::size_t s = 0; s < sweep.sets_per_build; ++s) {
      const QueryVector q = synthetic::uniform_query(sweep.d, rng);
      const SearchParams params{sweep.k, detail::draw_real(rng, 0, 1),
                                detail::draw_real(rng, 0.001, 1.0),
                                rng() % 2 ? Mode::kAvg : Mode::kMax};
      const auto set = detail::random_subset(rng, sweep.n,
                                             detail::draw(rng, 0, sweep.k - 1));
      RelevanceCache rel(items, q);
      DiversityCache cache(items, params.mode);
      for (ItemId p : set) cache.insert(p);

      // worst slack over this (build, set) pair
      double worst = std::numeric_limits<double>::infinity();
      std::string where;
      for (std::size_t idx = 0; idx < tree.nodes().size(); ++idx) {
        const BcNode& node = tree.nodes()[idx];
        if (!node.is_leaf()) continue;
        const double ip_qc = inner_product(tree.center(idx), q.view());
        const double ub_node = node_ball_bound(ip_qc, node.radius, q.norm, params);
        const bool has_cone = node.center_norm > 0.0;
        const ConeTerms ct =
            has_cone ? cone_terms(ip_qc, node.center_norm, q.norm) : ConeTerms{};
        for (std::uint32_t pos = node.begin; pos < node.end; ++pos) {
          const ItemId p = tree.order()[pos];
          if (cache.contains(p)) continue;
          const double gain = marginal_gain(p, rel(p), params, cache);
          const double ub_ball = point_ball_bound(ip_qc, tree.item_radius()[pos],
                                                  q.norm, params);
          const double ub_cone =
              has_cone ? point_cone_bound(ct, tree.norm_cos()[pos],
                                          tree.norm_sin()[pos], params)
                       : ub_ball;
          const double link = std::min(
              {ub_cone - gain, ub_ball - ub_cone, ub_node - ub_ball});
          if (link < worst) {
            worst = link;
            where = "build " + std::to_string(b) + ", set " +
                    std::to_string(s) + ", item " + std::to_string(p);
          }
        }
      }
      rep.record(worst, kCheckSlack, where);
    }
  }
  return rep;
}

struct EquivalenceSweep {
  std::size_t count = 100;
  std::size_t n = 2000;
  std::size_t d = 16;
  std::size_t k = 10;
  std::vector<double> lambdas{0.1, 0.5, 0.9};
  std::size_t leaf_size = kDefaultLeafSize;
};

// Tree-accelerated solvers return the same sequence and objective as the
// linear scans. Slack is 0 on a match and -1 on any difference.
inline SuiteReport suite_equivalence(const EquivalenceSweep& sweep,
                                     std::uint64_t seed) {
  SuiteReport rep;
  rep.name = "bc-equivalence";
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < sweep.count; ++t) {
    const ItemMatrix items = synthetic::uniform_items(sweep.n, sweep.d, rng);
    const QueryVector q = synthetic::uniform_query(sweep.d, rng);
    const BcTree tree = BcTree::build(items, sweep.leaf_size, rng());
    for (Mode mode : {Mode::kAvg, Mode::kMax}) {
      SearchParams params{sweep.k, detail::draw_from(rng, sweep.lambdas),
                          mode == Mode::kAvg ? 0.05 : 0.001, mode};
      const ResultSet g = greedy(items, q, params);
      const ResultSet bg = bc_greedy(tree, q, params);
      rep.record(g.items == bg.items && g.objective == bg.objective ? 0.0 : -1.0,
                 0.0, detail::describe(t, params) + " greedy");
      const ResultSet dg = dual_greedy(items, q, params);
      const ResultSet bdg = bc_dual_greedy(tree, q, params);
      rep.record(
          dg.items == bdg.items && dg.objective == bdg.objective ? 0.0 : -1.0,
          0.0, detail::describe(t, params) + " dual");
    }
  }
  return rep;
}

struct VerifyConfig {
  std::size_t n = 10;      // brute-force instance size cap
  std::size_t k = 3;       // largest k in the oracle suites
  std::size_t count = 200;
  std::size_t tree_n = 2000;
  std::size_t tree_builds = 5;
  std::uint64_t seed = kDefaultSeed;
};

// Refuses configurations whose brute force would exceed the subset limit.
inline void check_verify_guard(const VerifyConfig& cfg) {
  if (cfg.k < 2) throw ParamError("verify needs k >= 2");
  if (cfg.n <= cfg.k) throw ParamError("verify needs n > k");
  const double subsets = binomial(cfg.n, cfg.k);
  if (subsets > kMaxSubsets) {
    throw GuardError("brute force over C(" + std::to_string(cfg.n) + "," +
                     std::to_string(cfg.k) + ") exceeds the limit of 1e7 subsets");
  }
}

inline std::vector<SuiteReport> run_verify(const VerifyConfig& cfg) {
  check_verify_guard(cfg);
  OracleSweep oracle;
  oracle.count = cfg.count;
  oracle.max_n = cfg.n;
  oracle.ks.clear();
  for (std::size_t k = 2; k <= cfg.k; ++k) oracle.ks.push_back(k);

  TreeSweep chain;
  chain.builds = cfg.tree_builds;
  chain.n = cfg.tree_n;
  EquivalenceSweep eq;
  eq.count = cfg.tree_builds * 4;
  eq.n = cfg.tree_n;

  std::mt19937_64 seeds(cfg.seed);
  std::vector<SuiteReport> out;
  out.push_back(suite_submodularity(cfg.count * 5, 20, 8, seeds()));
  out.push_back(suite_greedy_bound(oracle, Mode::kAvg, seeds()));
  out.push_back(suite_greedy_bound(oracle, Mode::kMax, seeds()));
  out.push_back(suite_dual_ratio(oracle, seeds()));
  out.push_back(suite_bound_chain(chain, seeds()));
  out.push_back(suite_equivalence(eq, seeds()));
  return out;
}

}  // namespace dkmips
