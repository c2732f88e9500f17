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
// Brute-force ground truth and approximation-guarantee checkers.
//
// Nothing here reuses the objective module's caches or evaluators: subsets
// are scored from a Gram matrix with the objective written out again, so the
// oracle stays an independent second route to every value it checks.
//

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dkmips/dataset.hpp"
#include "dkmips/error.hpp"
#include "dkmips/greedy.hpp"
#include "dkmips/objective.hpp"

namespace dkmips {

// Largest number of size-k subsets brute_force_opt() will enumerate.
inline constexpr double kMaxSubsets = 1e7;

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(c);
}

struct OracleResult {
  std::vector<ItemId> optimal;  // S*, lexicographically first among ties
  double optimal_value = 0.0;
  double div_star = 0.0;      // diversity cap for params.mode
  double div_star_max = 0.0;  // mu(1-lambda) max_{p != p'} <p,p'>
  std::vector<ItemId> kmips;  // S', top-k by <p,q>
  double kmips_value = 0.0;
  double kmips_relevance = 0.0;  // lambda/k sum_{S'} <p,q>
};

// Scores arbitrary subsets of one instance from scratch.
class SubsetScorer {
 public:
  SubsetScorer(const ItemMatrix& items, const QueryVector& q,
               const SearchParams& params)
      : items_(&items), params_(params), n_(items.size()) {
    check_query_dim(items, q);
    ipq_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      const auto row = items.row(static_cast<ItemId>(i));
      for (std::size_t j = 0; j < row.size(); ++j) s += double(row[j]) * q.coords[j];
      ipq_[i] = s;
    }
    if (n_ <= kGramLimit) {
      gram_.resize(n_ * n_);
      for (std::size_t a = 0; a < n_; ++a) {
        for (std::size_t b = a; b < n_; ++b) {
          gram_[a * n_ + b] = gram_[b * n_ + a] = raw_ip(a, b);
        }
      }
    }
  }

  double ip(std::size_t a, std::size_t b) const {
    return gram_.empty() ? raw_ip(a, b) : gram_[a * n_ + b];
  }
  double ipq(std::size_t a) const { return ipq_[a]; }

  double relevance(std::span<const ItemId> s) const {
    double sum = 0.0;
    for (ItemId p : s) sum += ipq_[p];
    return params_.lambda / double(params_.k) * sum;
  }

  // The subtracted diversity term of the objective (>= 0 for non-negative
  // data).
  double diversity(std::span<const ItemId> s) const {
    const double k = double(params_.k);
    if (s.size() < 2) return 0.0;
    if (params_.mode == Mode::kAvg) {
      double pairs = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) pairs += ip(s[i], s[j]);
      return 2.0 * params_.mu * (1.0 - params_.lambda) / (k * (k - 1.0)) * pairs;
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j) mx = std::max(mx, ip(s[i], s[j]));
    return params_.mu * (1.0 - params_.lambda) * mx;
  }

  double value(std::span<const ItemId> s) const {
    return relevance(s) - diversity(s);
  }

  // max over all pairs of P, 0 when n < 2
  double max_pair() const {
    double mx = 0.0;
    bool any = false;
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = a + 1; b < n_; ++b) {
        const double v = ip(a, b);
        mx = any ? std::max(mx, v) : v;
        any = true;
      }
    return mx;
  }

  std::size_t size() const { return n_; }
  const SearchParams& params() const { return params_; }

 private:
  static constexpr std::size_t kGramLimit = 2048;

  double raw_ip(std::size_t a, std::size_t b) const {
    const auto ra = items_->row(static_cast<ItemId>(a));
    const auto rb = items_->row(static_cast<ItemId>(b));
    double s = 0.0;
    for (std::size_t j = 0; j < ra.size(); ++j) s += double(ra[j]) * double(rb[j]);
    return s;
  }

  const ItemMatrix* items_;
  SearchParams params_;
  std::size_t n_;
  std::vector<double> ipq_;
  std::vector<double> gram_;
};

namespace detail {

// Visits every size-k subset of {0..n-1} in lexicographic order.
template <class Visit>
void for_each_subset(std::size_t n, std::size_t k, Visit&& visit) {
  std::vector<ItemId> idx(k);
  std::iota(idx.begin(), idx.end(), ItemId{0});
  if (k > n) return;
  while (true) {
    visit(std::span<const ItemId>(idx));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

inline OracleResult brute_force_opt(const ItemMatrix& items,
                                    const QueryVector& q,
                                    const SearchParams& params) {
  params.validate();
  const std::size_t n = items.size();
  const std::size_t k = params.k;
  if (k > n) throw ParamError("k exceeds n");
  const double subsets = binomial(n, k);
  if (subsets > kMaxSubsets) {
    throw GuardError("brute force over C(" + std::to_string(n) + "," +
                     std::to_string(k) + ") = " + std::to_string(subsets) +
                     " subsets exceeds the limit of 1e7");
  }

  const SubsetScorer scorer(items, q, params);
  OracleResult out;
  out.optimal_value = -std::numeric_limits<double>::infinity();

  // Avg-mode cap needs its own maximisation over subsets.
  SearchParams avg = params;
  avg.mode = Mode::kAvg;
  const SubsetScorer avg_scorer(items, q, avg);
  double avg_cap = 0.0;
  bool first = true;

  detail::for_each_subset(n, k, [&](std::span<const ItemId> s) {
    const double v = scorer.value(s);
    if (v > out.optimal_value) {
      out.optimal_value = v;
      out.optimal.assign(s.begin(), s.end());
    }
    if (params.mode == Mode::kAvg) {
      const double dv = avg_scorer.diversity(s);
      avg_cap = first ? dv : std::max(avg_cap, dv);
      first = false;
    }
  });

  out.div_star_max = params.mu * (1.0 - params.lambda) * scorer.max_pair();
  out.div_star = params.mode == Mode::kAvg ? avg_cap : out.div_star_max;

  std::vector<ItemId> order(n);
  std::iota(order.begin(), order.end(), ItemId{0});
  std::stable_sort(order.begin(), order.end(), [&](ItemId a, ItemId b) {
    return scorer.ipq(a) > scorer.ipq(b);
  });
  out.kmips.assign(order.begin(), order.begin() + k);
  out.kmips_value = scorer.value(out.kmips);
  out.kmips_relevance = scorer.relevance(out.kmips);
  return out;
}

enum class Verdict { kPass, kFail, kSkipped };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    default: return "skipped";
  }
}

struct CheckResult {
  Verdict verdict = Verdict::kSkipped;
  double achieved = 0.0;  // f(S) of the solver output
  double bound = 0.0;     // guaranteed lower bound
  double slack = 0.0;     // achieved - bound

  bool ok() const { return verdict != Verdict::kFail; }
};

inline constexpr double kCheckSlack = 1e-9;

// f_avg(DualGreedy) >= 1/4 f_avg(S*) - 3/4 div*_max.
inline CheckResult check_dualgreedy_ratio(const ItemMatrix& items,
                                          const QueryVector& q,
                                          const SearchParams& params) {
  if (params.mode != Mode::kAvg) {
    throw ParamError("the 1/4 ratio check applies to the avg objective only");
  }
  const OracleResult opt = brute_force_opt(items, q, params);
  const ResultSet res = dual_greedy(items, q, params);
  const SubsetScorer scorer(items, q, params);
  CheckResult c;
  c.achieved = scorer.value(res.items);
  c.bound = 0.25 * opt.optimal_value - 0.75 * opt.div_star_max;
  c.slack = c.achieved - c.bound;
  c.verdict = c.slack >= -kCheckSlack ? Verdict::kPass : Verdict::kFail;
  return c;
}

// f(Greedy) >= max(f(S')/fbar(S') f(S*), f(S*) - div*) - Delta', provided
// f(S') > 0; skipped otherwise.
inline CheckResult check_greedy_datadep(const ItemMatrix& items,
                                        const QueryVector& q,
                                        const SearchParams& params) {
  const OracleResult opt = brute_force_opt(items, q, params);
  CheckResult c;
  if (!(opt.kmips_value > 0.0)) return c;
  const ResultSet res = greedy(items, q, params);
  const SubsetScorer scorer(items, q, params);
  c.achieved = scorer.value(res.items);
  const double ratio = opt.kmips_value / opt.kmips_relevance;
  const double delta = std::max(0.0, opt.kmips_value - c.achieved);
  c.bound = std::max(ratio * opt.optimal_value,
                     opt.optimal_value - opt.div_star) -
            delta;
  c.slack = c.achieved - c.bound;
  c.verdict = c.slack >= -kCheckSlack ? Verdict::kPass : Verdict::kFail;
  return c;
}

// Full scan with from-scratch marginal gains, ties to the lower id.
inline Candidate naive_find_best(const ItemMatrix& items, const QueryVector& q,
                                 std::span<const ItemId> set,
                                 const SearchParams& params) {
  const SubsetScorer scorer(items, q, params);
  std::vector<std::uint8_t> in_set(items.size(), 0);
  for (ItemId p : set) in_set[p] = 1;

  // largest pairwise <p,p'> inside S, 0 below two members
  double set_max = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      const double v = scorer.ip(set[i], set[j]);
      set_max = (i == 0 && j == 1) ? v : std::max(set_max, v);
    }

  const double rel = params.lambda / double(params.k);
  Candidate best;
  for (ItemId p = 0; p < items.size(); ++p) {
    if (in_set[p]) continue;
    double penalty = 0.0;
    if (params.mode == Mode::kAvg) {
      double sum = 0.0;
      for (ItemId s : set) sum += scorer.ip(p, s);
      const double k = double(params.k);
      penalty = params.k < 2 ? 0.0
                             : 2.0 * params.mu * (1.0 - params.lambda) /
                                   (k * (k - 1.0)) * sum;
    } else if (!set.empty()) {
      double with_p = set.size() >= 2 ? set_max : -std::numeric_limits<double>::infinity();
      for (ItemId s : set) with_p = std::max(with_p, scorer.ip(p, s));
      penalty = params.mu * (1.0 - params.lambda) * (with_p - set_max);
    }
    const double g = rel * scorer.ipq(p) - penalty;
    if (!best.found() || g > best.gain) best = {p, g};
  }
  return best;
}

}  // namespace dkmips
