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
// Diversity-aware objectives and their marginal gains.
//
//   f_avg(S) = lambda/k * sum_{p in S} <p,q>
//              - 2 mu (1-lambda) / (k(k-1)) * sum_{unordered pairs} <p,p'>
//   f_max(S) = lambda/k * sum_{p in S} <p,q>
//              - mu (1-lambda) * max_{pairs} <p,p'>
//
// The max over fewer than two items is 0, and f(empty) = 0.
//

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dkmips/dataset.hpp"
#include "dkmips/error.hpp"

namespace dkmips {

enum class Mode { kAvg, kMax };

inline std::string_view mode_name(Mode m) {
  return m == Mode::kAvg ? "avg" : "max";
}

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct SearchParams {
  std::size_t k = 10;
  double lambda = 0.5;
  double mu = 0.05;
  Mode mode = Mode::kAvg;

  void validate() const {
    if (k < 1) throw ParamError("k must be >= 1");
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
      throw ParamError("lambda must lie in [0,1], got " +
                       std::to_string(lambda));
    }
    if (!(mu > 0.0) || !std::isfinite(mu)) {
      throw ParamError("mu must be positive, got " + std::to_string(mu));
    }
  }

  double relevance_coef() const { return lambda / static_cast<double>(k); }
  // Zero for k < 2, where no pair can ever be formed.
  double avg_coef() const {
    if (k < 2) return 0.0;
    const double kk = static_cast<double>(k);
    return 2.0 * mu * (1.0 - lambda) / (kk * (kk - 1.0));
  }
  double max_coef() const { return mu * (1.0 - lambda); }
};

// Pruning and work counters. All zero for linear scans.
struct SearchStats {
  std::uint64_t steps = 0;  // argmax calls served
  std::uint64_t nodes_visited = 0;
  std::uint64_t nodes_pruned = 0;
  std::uint64_t items_scanned = 0;  // items whose <p,q> was evaluated
  std::uint64_t items_pruned_node = 0;
  std::uint64_t items_pruned_ball = 0;
  std::uint64_t items_pruned_cone = 0;

  SearchStats& operator+=(const SearchStats& o) {
    steps += o.steps;
    nodes_visited += o.nodes_visited;
    nodes_pruned += o.nodes_pruned;
    items_scanned += o.items_scanned;
    items_pruned_node += o.items_pruned_node;
    items_pruned_ball += o.items_pruned_ball;
    items_pruned_cone += o.items_pruned_cone;
    return *this;
  }
};

struct ResultSet {
  std::vector<ItemId> items;  // insertion order
  std::vector<double> gains;  // marginal gain of each insertion
  double objective = 0.0;
  SearchStats stats;
};

namespace detail {

inline void check_ids(const ItemMatrix& items, std::span<const ItemId> set) {
  std::vector<ItemId> sorted(set.begin(), set.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] >= items.size()) {
      throw LogicError("item id " + std::to_string(sorted[i]) +
                       " out of range (n=" + std::to_string(items.size()) +
                       ")");
    }
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw LogicError("duplicate item id " + std::to_string(sorted[i]));
    }
  }
}

inline double relevance_sum(const ItemMatrix& items, std::span<const ItemId> set,
                            const QueryVector& q) {
  double sum = 0.0;
  for (ItemId p : set) sum += inner_product(items.row(p), q.view());
  return sum;
}

}  // namespace detail

inline double eval_f_avg(const ItemMatrix& items, std::span<const ItemId> set,
                         const QueryVector& q, const SearchParams& params) {
  check_query_dim(items, q);
  detail::check_ids(items, set);
  if (set.size() >= 2 && params.k < 2) {
    throw ParamError("f_avg over two or more items needs k > 1");
  }
  const double rel = detail::relevance_sum(items, set, q);
  double pairs = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      pairs += items.ip(set[i], set[j]);
    }
  }
  return params.relevance_coef() * rel - params.avg_coef() * pairs;
}

inline double eval_f_max(const ItemMatrix& items, std::span<const ItemId> set,
                         const QueryVector& q, const SearchParams& params) {
  check_query_dim(items, q);
  detail::check_ids(items, set);
  const double rel = detail::relevance_sum(items, set, q);
  double max_pair = 0.0;
  if (set.size() >= 2) {
    max_pair = kNegInf;
    for (std::size_t i = 0; i < set.size(); ++i) {
      for (std::size_t j = i + 1; j < set.size(); ++j) {
        max_pair = std::max(max_pair, items.ip(set[i], set[j]));
      }
    }
  }
  return params.relevance_coef() * rel - params.max_coef() * max_pair;
}

inline double eval_f(const ItemMatrix& items, std::span<const ItemId> set,
                     const QueryVector& q, const SearchParams& params) {
  return params.mode == Mode::kAvg ? eval_f_avg(items, set, q, params)
                                   : eval_f_max(items, set, q, params);
}

// Lazily evaluated <p,q> for one query.
class RelevanceCache {
 public:
  RelevanceCache(const ItemMatrix&&, const QueryVector&) = delete;
  RelevanceCache(const ItemMatrix&, const QueryVector&&) = delete;
  RelevanceCache(const ItemMatrix& items, const QueryVector& q)
      : items_(&items), q_(&q), ip_(items.size()), known_(items.size(), 0) {
    check_query_dim(items, q);
  }

  double operator()(ItemId p) {
    if (!known_[p]) {
      ip_[p] = inner_product(items_->row(p), q_->view());
      known_[p] = 1;
    }
    return ip_[p];
  }

  const QueryVector& query() const { return *q_; }

 private:
  const ItemMatrix* items_;
  const QueryVector* q_;
  std::vector<double> ip_;
  std::vector<std::uint8_t> known_;
};

//
// Per-candidate diversity state for one result set S.
//
// Avg mode keeps div_avg(p,S) = sum_{p' in S} <p,p'>; Max mode keeps
// div_max(p,S) = max_{p' in S} <p,p'> together with the largest pairwise
// inner product inside S. Each entry remembers how many members of S it has
// absorbed and catches up on demand, so an insertion costs O(|S| d) instead of
// O(nd) while every entry still sums its terms in insertion order.
//
class DiversityCache {
 public:
  DiversityCache(const ItemMatrix&&, Mode) = delete;
  DiversityCache(const ItemMatrix& items, Mode mode)
      : items_(&items),
        mode_(mode),
        div_(items.size(), 0.0),
        synced_(items.size(), 0),
        selected_(items.size(), 0) {}

  Mode mode() const { return mode_; }
  std::size_t size() const { return members_.size(); }
  bool contains(ItemId p) const { return selected_[p] != 0; }
  const std::vector<ItemId>& members() const { return members_; }
  std::span<const std::uint8_t> mask() const { return selected_; }

  // div_avg(p,S) or div_max(p,S); 0 for an empty S.
  double diversity(ItemId p) {
    const auto target = static_cast<std::uint32_t>(members_.size());
    std::uint32_t j = synced_[p];
    if (j == target) return div_[p];
    double v = div_[p];
    for (; j < target; ++j) {
      const double ip = items_->ip(p, members_[j]);
      if (mode_ == Mode::kAvg) {
        v += ip;
      } else {
        v = (j == 0) ? ip : std::max(v, ip);
      }
    }
    div_[p] = v;
    synced_[p] = target;
    return v;
  }

  // Largest <p,p'> over distinct members; 0 while |S| < 2.
  double max_pair() const { return max_pair_; }

  void insert(ItemId p) {
    if (p >= selected_.size()) {
      throw LogicError("item id " + std::to_string(p) + " out of range");
    }
    if (selected_[p]) {
      throw LogicError("item " + std::to_string(p) + " already selected");
    }
    if (mode_ == Mode::kMax && !members_.empty()) {
      const double d = diversity(p);
      max_pair_ = members_.size() == 1 ? d : std::max(max_pair_, d);
    }
    members_.push_back(p);
    selected_[p] = 1;
  }

  // Brings every entry up to date (the eager O(nd) update).
  void sync_all() {
    for (std::size_t i = 0; i < div_.size(); ++i) {
      diversity(static_cast<ItemId>(i));
    }
  }

 private:
  const ItemMatrix* items_;
  Mode mode_;
  std::vector<double> div_;
  std::vector<std::uint32_t> synced_;
  std::vector<std::uint8_t> selected_;
  std::vector<ItemId> members_;
  double max_pair_ = 0.0;
};

namespace detail {

inline double max_increase(DiversityCache& cache, ItemId p) {
  switch (cache.size()) {
    case 0:
      return 0.0;
    case 1:
      return cache.diversity(p);
    default: {
      const double mp = cache.max_pair();
      return std::max(cache.diversity(p), mp) - mp;
    }
  }
}

inline void check_candidate(const DiversityCache& cache, ItemId p, Mode mode) {
  if (cache.mode() != mode) {
    throw LogicError("diversity cache was built for a different mode");
  }
  if (cache.contains(p)) {
    throw LogicError("marginal gain requested for item " + std::to_string(p) +
                     " which is already in the result set");
  }
}

}  // namespace detail

// Delta_avg(p,S) from the cached sum; ip_pq = <p,q>.
inline double marginal_avg(ItemId p, double ip_pq, const SearchParams& params,
                           DiversityCache& cache) {
  detail::check_candidate(cache, p, Mode::kAvg);
  return params.relevance_coef() * ip_pq -
         params.avg_coef() * cache.diversity(p);
}

// Delta_max(p,S) = lambda/k <p,q> - mu(1-lambda) *
//   (maxpair(S + p) - maxpair(S)).
inline double marginal_max(ItemId p, double ip_pq, const SearchParams& params,
                           DiversityCache& cache) {
  detail::check_candidate(cache, p, Mode::kMax);
  return params.relevance_coef() * ip_pq -
         params.max_coef() * detail::max_increase(cache, p);
}

inline double marginal_gain(ItemId p, double ip_pq, const SearchParams& params,
                            DiversityCache& cache) {
  return params.mode == Mode::kAvg ? marginal_avg(p, ip_pq, params, cache)
                                   : marginal_max(p, ip_pq, params, cache);
}

}  // namespace dkmips
