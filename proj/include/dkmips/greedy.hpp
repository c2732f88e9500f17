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
// Greedy solvers.
//
// greedy_with() and dual_greedy_with() are written against a "finder": any
// callable that returns the unexcluded item with the largest marginal gain,
//
//   Candidate find(RelevanceCache&, DiversityCache&,
//                  std::span<const std::uint8_t> excluded,
//                  const SearchParams&, SearchStats&);
//
// LinearScan below is the O(nd) finder; the BC-Tree provides a pruned one.
// Every finder must break exact ties toward the lower item id.
//

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dkmips/dataset.hpp"
#include "dkmips/error.hpp"
#include "dkmips/objective.hpp"

namespace dkmips {

struct Candidate {
  ItemId id = kNoItem;
  double gain = kNegInf;

  bool found() const { return id != kNoItem; }
};

// True when (gain, id) should replace the incumbent: strictly larger gain, or
// an exact tie with a smaller id.
inline bool improves(const Candidate& best, double gain, ItemId id) {
  if (!best.found()) return true;
  return gain > best.gain || (gain == best.gain && id < best.id);
}

class LinearScan {
 public:
  explicit LinearScan(const ItemMatrix& items) : items_(&items) {}

  Candidate operator()(RelevanceCache& rel, DiversityCache& cache,
                       std::span<const std::uint8_t> excluded,
                       const SearchParams& params, SearchStats&) const {
    Candidate best;
    const auto n = static_cast<ItemId>(items_->size());
    for (ItemId p = 0; p < n; ++p) {
      if (excluded[p]) continue;
      const double g = marginal_gain(p, rel(p), params, cache);
      if (!best.found() || g > best.gain) best = {p, g};
    }
    return best;
  }

 private:
  const ItemMatrix* items_;
};

namespace detail {

inline void check_solver_args(const ItemMatrix& items, const QueryVector& q,
                              const SearchParams& params) {
  params.validate();
  check_query_dim(items, q);
  if (params.k > items.size()) {
    throw ParamError("k = " + std::to_string(params.k) +
                     " exceeds the number of items n = " +
                     std::to_string(items.size()));
  }
}

}  // namespace detail

// The k items with the largest <p,q>, descending, ties to the lower id.
// gains/objective are evaluated under params so the result can be scored.
inline ResultSet linear_topk(const ItemMatrix& items, const QueryVector& q,
                             const SearchParams& params) {
  detail::check_solver_args(items, q, params);
  RelevanceCache rel(items, q);
  std::vector<ItemId> order(items.size());
  std::iota(order.begin(), order.end(), ItemId{0});
  std::vector<double> ips(items.size());
  for (ItemId p = 0; p < items.size(); ++p) ips[p] = rel(p);
  std::partial_sort(order.begin(), order.begin() + params.k, order.end(),
                    [&](ItemId a, ItemId b) {
                      return ips[a] > ips[b] || (ips[a] == ips[b] && a < b);
                    });
  ResultSet out;
  DiversityCache cache(items, params.mode);
  for (std::size_t i = 0; i < params.k; ++i) {
    const ItemId p = order[i];
    out.gains.push_back(marginal_gain(p, ips[p], params, cache));
    out.items.push_back(p);
    cache.insert(p);
  }
  out.objective = eval_f(items, out.items, q, params);
  return out;
}

template <class Finder>
ResultSet greedy_with(const ItemMatrix& items, const QueryVector& q,
                      const SearchParams& params, Finder&& find) {
  detail::check_solver_args(items, q, params);
  RelevanceCache rel(items, q);
  DiversityCache cache(items, params.mode);
  ResultSet out;

  // First pick is the plain maximum inner product item.
  SearchParams mips = params;
  mips.lambda = 1.0;
  mips.k = 1;
  Candidate first = find(rel, cache, cache.mask(), mips, out.stats);
  ++out.stats.steps;
  out.gains.push_back(marginal_gain(first.id, rel(first.id), params, cache));
  out.items.push_back(first.id);
  cache.insert(first.id);

  for (std::size_t i = 1; i < params.k; ++i) {
    const Candidate c = find(rel, cache, cache.mask(), params, out.stats);
    ++out.stats.steps;
    if (!c.found()) throw LogicError("greedy ran out of candidates");
    out.gains.push_back(c.gain);
    out.items.push_back(c.id);
    cache.insert(c.id);
  }
  out.objective = eval_f(items, out.items, q, params);
  return out;
}

template <class Finder>
ResultSet dual_greedy_with(const ItemMatrix& items, const QueryVector& q,
                           const SearchParams& params, Finder&& find) {
  detail::check_solver_args(items, q, params);
  RelevanceCache rel(items, q);
  DiversityCache first(items, params.mode);
  DiversityCache second(items, params.mode);
  std::vector<double> first_gains, second_gains;
  std::vector<std::uint8_t> excluded(items.size(), 0);
  SearchStats stats;

  const std::size_t k = params.k;
  while (first.size() < k || second.size() < k) {
    Candidate c1, c2;
    if (first.size() < k) {
      c1 = find(rel, first, excluded, params, stats);
      ++stats.steps;
    }
    if (second.size() < k) {
      c2 = find(rel, second, excluded, params, stats);
      ++stats.steps;
    }
    if (std::max(c1.gain, c2.gain) <= 0.0) break;
    if (c1.gain >= c2.gain) {
      first.insert(c1.id);
      first_gains.push_back(c1.gain);
      excluded[c1.id] = 1;
    } else {
      second.insert(c2.id);
      second_gains.push_back(c2.gain);
      excluded[c2.id] = 1;
    }
  }

  const double f1 = eval_f(items, first.members(), q, params);
  const double f2 = eval_f(items, second.members(), q, params);
  ResultSet out;
  if (f1 >= f2) {
    out.items = first.members();
    out.gains = std::move(first_gains);
    out.objective = f1;
  } else {
    out.items = second.members();
    out.gains = std::move(second_gains);
    out.objective = f2;
  }
  out.stats = stats;
  return out;
}

inline ResultSet greedy(const ItemMatrix& items, const QueryVector& q,
                        const SearchParams& params) {
  return greedy_with(items, q, params, LinearScan(items));
}

inline ResultSet dual_greedy(const ItemMatrix& items, const QueryVector& q,
                             const SearchParams& params) {
  return dual_greedy_with(items, q, params, LinearScan(items));
}

}  // namespace dkmips
