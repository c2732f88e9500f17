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
// Ball-cone tree (BC-Tree) and bound-driven best-candidate search.
//
// Every node keeps a ball (centroid c, radius r). Items live in one flat
// array ordered so that each node owns a contiguous range; inside a leaf the
// range is sorted by descending r_p = |p - c| and carries the cone terms
// |p| cos(phi_p) = <p,c>/|c| and |p| sin(phi_p).
//
// For non-negative data and any result set S the marginal gain satisfies
//
//   Delta(p,S) <= lambda/k <p,q>
//              <= lambda/k (|q|cos(theta) |p|cos(phi_p) +
//                           |q|sin(theta) |p|sin(phi_p))      (cone)
//              <= lambda/k (<q,c> + r_p |q|)                  (point ball)
//              <= lambda/k (<q,c> + r |q|)                    (node ball)
//
// which lets find_best() skip whole subtrees, batches of leaf items and
// single items while returning exactly the linear-scan answer.
//

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dkmips/dataset.hpp"
#include "dkmips/error.hpp"
#include "dkmips/greedy.hpp"
#include "dkmips/objective.hpp"

namespace dkmips {

inline constexpr std::size_t kDefaultLeafSize = 100;
inline constexpr std::uint64_t kDefaultSeed = 42;

// Relative slack added to every bound before it is allowed to prune. It only
// absorbs floating-point rounding in <q,c> and the derived child products.
inline constexpr double kBoundSlack = 1e-9;

struct BcNode {
  static constexpr std::uint32_t kNone = 0xffffffffu;

  std::uint32_t begin = 0;  // range in BcTree::order()
  std::uint32_t end = 0;
  std::uint32_t left = kNone;
  std::uint32_t right = kNone;
  double radius = 0.0;
  double center_norm = 0.0;

  bool is_leaf() const { return left == kNone; }
  std::size_t count() const { return end - begin; }
};

// Node-level ball bound: lambda/k (<q,c> + r |q|).
inline double node_ball_bound(double ip_qc, double radius, double q_norm,
                              const SearchParams& params) {
  return params.relevance_coef() * (ip_qc + radius * q_norm);
}

// Same form with the item's own radius r_p; increasing in r_p.
inline double point_ball_bound(double ip_qc, double r_p, double q_norm,
                               const SearchParams& params) {
  return params.relevance_coef() * (ip_qc + r_p * q_norm);
}

// |q| cos(theta) and |q| sin(theta) for the angle between q and a leaf
// center, computed once per leaf from <q,c>.
struct ConeTerms {
  double q_cos = 0.0;
  double q_sin = 0.0;
};

inline ConeTerms cone_terms(double ip_qc, double center_norm, double q_norm) {
  ConeTerms t;
  t.q_cos = ip_qc / center_norm;
  t.q_sin = std::sqrt(std::max(0.0, q_norm * q_norm - t.q_cos * t.q_cos));
  return t;
}

// lambda/k |p||q| cos(|theta - phi_p|), expanded.
inline double point_cone_bound(const ConeTerms& t, double norm_cos,
                               double norm_sin, const SearchParams& params) {
  return params.relevance_coef() * (t.q_cos * norm_cos + t.q_sin * norm_sin);
}

class BcTree {
 public:
  // The tree keeps a reference to `items`.
  static BcTree build(const ItemMatrix&&, std::size_t = kDefaultLeafSize,
                      std::uint64_t = kDefaultSeed) = delete;
  static BcTree build(const ItemMatrix& items,
                      std::size_t leaf_size = kDefaultLeafSize,
                      std::uint64_t seed = kDefaultSeed) {
    if (leaf_size < 1) throw ParamError("leaf size must be >= 1");
    BcTree tree(items, leaf_size);
    tree.construct(seed);
    return tree;
  }

  const ItemMatrix& items() const { return *items_; }
  std::size_t leaf_size() const { return leaf_size_; }
  // Bounds are sound only for non-negative items.
  bool sound() const { return items_->non_negative(); }

  const std::vector<BcNode>& nodes() const { return nodes_; }
  const BcNode& root() const { return nodes_.front(); }
  std::span<const double> center(std::size_t node) const {
    return {centers_.data() + node * dim_, dim_};
  }

  // Item ids in tree order; per-position leaf arrays run parallel to it.
  const std::vector<ItemId>& order() const { return order_; }
  const std::vector<double>& item_radius() const { return radius_; }
  const std::vector<double>& norm_cos() const { return norm_cos_; }
  const std::vector<double>& norm_sin() const { return norm_sin_; }

  // Empty when every structural invariant holds, otherwise a description of
  // the first violation found.
  std::optional<std::string> validate() const;

  // argmax over items not in `excluded` of the marginal gain w.r.t. the set
  // held by `cache`, ties to the lower id. Returns an empty Candidate when
  // every item is excluded.
  Candidate find_best(RelevanceCache& rel, DiversityCache& cache,
                      std::span<const std::uint8_t> excluded,
                      const SearchParams& params, SearchStats& stats) const;

  // Adapter so the tree can be handed to greedy_with()/dual_greedy_with().
  auto finder() const {
    return [this](RelevanceCache& rel, DiversityCache& cache,
                  std::span<const std::uint8_t> excluded,
                  const SearchParams& params, SearchStats& stats) {
      return find_best(rel, cache, excluded, params, stats);
    };
  }

 private:
  BcTree(const ItemMatrix& items, std::size_t leaf_size)
      : items_(&items), leaf_size_(leaf_size), dim_(items.dim()) {}

  void construct(std::uint64_t seed);
  void make_leaf(std::size_t node_idx);
  std::uint32_t split(std::uint32_t begin, std::uint32_t end,
                      std::mt19937_64& rng);

  struct SearchState;
  void subtree_search(SearchState& s, std::uint32_t node, double ip) const;
  void filter_scan(SearchState& s, const BcNode& node, double ip) const;

  const ItemMatrix* items_;
  std::size_t leaf_size_;
  std::size_t dim_;
  std::vector<BcNode> nodes_;
  std::vector<double> centers_;  // nodes_.size() * dim_
  std::vector<ItemId> order_;
  std::vector<double> radius_;
  std::vector<double> norm_cos_;
  std::vector<double> norm_sin_;
};

// ---------------------------------------------------------------------------
//  construction
// ---------------------------------------------------------------------------

inline void BcTree::construct(std::uint64_t seed) {
  const std::size_t n = items_->size();
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), ItemId{0});
  radius_.assign(n, 0.0);
  norm_cos_.assign(n, 0.0);
  norm_sin_.assign(n, 0.0);

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pending;  // node indices still to be expanded
  nodes_.push_back(BcNode{0, static_cast<std::uint32_t>(n)});
  pending.push_back(0);

  while (!pending.empty()) {
    const std::size_t idx = pending.back();
    pending.pop_back();
    const std::uint32_t b = nodes_[idx].begin;
    const std::uint32_t e = nodes_[idx].end;

    // centroid and covering radius
    centers_.resize(nodes_.size() * dim_, 0.0);
    std::vector<double> c(dim_, 0.0);
    for (std::uint32_t i = b; i < e; ++i) {
      const auto row = items_->row(order_[i]);
      for (std::size_t j = 0; j < dim_; ++j) c[j] += row[j];
    }
    const double inv = 1.0 / static_cast<double>(e - b);
    for (double& v : c) v *= inv;
    double r = 0.0;
    for (std::uint32_t i = b; i < e; ++i) {
      r = std::max(r, l2_distance(items_->row(order_[i]),
                                  std::span<const double>(c)));
    }
    std::copy(c.begin(), c.end(), centers_.begin() + idx * dim_);
    nodes_[idx].radius = r;
    nodes_[idx].center_norm = l2_norm(std::span<const double>(c));

    if (e - b <= leaf_size_) {
      make_leaf(idx);
      continue;
    }

    const std::uint32_t mid = split(b, e, rng);
    const auto left = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(BcNode{b, mid});
    nodes_.push_back(BcNode{mid, e});
    nodes_[idx].left = left;
    nodes_[idx].right = left + 1;
    pending.push_back(left + 1);
    pending.push_back(left);
  }
  centers_.resize(nodes_.size() * dim_);
}

inline void BcTree::make_leaf(std::size_t idx) {
  const BcNode& node = nodes_[idx];
  const auto c = center(idx);
  struct Entry {
    ItemId id;
    double r, cos, sin;
  };
  std::vector<Entry> entries;
  entries.reserve(node.count());
  for (std::uint32_t i = node.begin; i < node.end; ++i) {
    const ItemId p = order_[i];
    const auto row = items_->row(p);
    Entry en{p, l2_distance(row, c), 0.0, 0.0};
    const double pn = items_->norm(p);
    if (node.center_norm > 0.0) {
      en.cos = inner_product(row, c) / node.center_norm;
      en.sin = std::sqrt(std::max(0.0, pn * pn - en.cos * en.cos));
    } else {
      en.sin = pn;
    }
    entries.push_back(en);
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.r > b.r || (a.r == b.r && a.id < b.id);
  });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::size_t pos = node.begin + i;
    order_[pos] = entries[i].id;
    radius_[pos] = entries[i].r;
    norm_cos_[pos] = entries[i].cos;
    norm_sin_[pos] = entries[i].sin;
  }
}

// Seed-growth split: random v, p_l farthest from v, p_r farthest from p_l,
// each item to its closer pivot (ties left). Reorders order_[b,e) so the left
// side comes first and returns the boundary.
inline std::uint32_t BcTree::split(std::uint32_t b, std::uint32_t e,
                                   std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> pick(b, e - 1);
  const ItemId v = order_[pick(rng)];

  auto farthest = [&](ItemId from) {
    ItemId best = order_[b];
    double best_d = -1.0;
    for (std::uint32_t i = b; i < e; ++i) {
      const double d = l2_distance(items_->row(order_[i]), items_->row(from));
      if (d > best_d) {
        best_d = d;
        best = order_[i];
      }
    }
    return best;
  };
  const ItemId pl = farthest(v);
  const ItemId pr = farthest(pl);

  std::vector<std::uint8_t> goes_left(e - b);
  std::size_t n_left = 0;
  for (std::uint32_t i = b; i < e; ++i) {
    const auto row = items_->row(order_[i]);
    goes_left[i - b] =
        l2_distance(row, items_->row(pl)) <= l2_distance(row, items_->row(pr));
    n_left += goes_left[i - b];
  }

  std::uint32_t mid;
  if (n_left == 0 || n_left == e - b) {
    // coincident or equidistant items: halve in scan order
    mid = b + (e - b) / 2;
  } else {
    std::vector<ItemId> left, right;
    left.reserve(n_left);
    right.reserve(e - b - n_left);
    for (std::uint32_t i = b; i < e; ++i) {
      (goes_left[i - b] ? left : right).push_back(order_[i]);
    }
    std::copy(left.begin(), left.end(), order_.begin() + b);
    std::copy(right.begin(), right.end(), order_.begin() + b + left.size());
    mid = b + static_cast<std::uint32_t>(left.size());
  }
  return mid;
}

inline std::optional<std::string> BcTree::validate() const {
  const std::size_t n = items_->size();
  if (order_.size() != n) return "order array does not cover every item";
  std::vector<std::uint8_t> seen(n, 0);
  for (ItemId p : order_) {
    if (p >= n || seen[p]) return "order array is not a permutation";
    seen[p] = 1;
  }
  if (root().begin != 0 || root().end != n) return "root does not hold all items";

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const BcNode& node = nodes_[i];
    const std::string where = "node " + std::to_string(i) + ": ";
    if (node.count() == 0) return where + "empty node";
    const auto c = center(i);
    const double tol = 1e-6 * std::max(node.radius, 1e-12);
    for (std::uint32_t pos = node.begin; pos < node.end; ++pos) {
      const double dist = l2_distance(items_->row(order_[pos]), c);
      if (dist > node.radius + tol) return where + "item outside ball";
    }
    if (node.is_leaf()) {
      if (node.count() > leaf_size_) return where + "leaf exceeds capacity";
      for (std::uint32_t pos = node.begin; pos < node.end; ++pos) {
        const ItemId p = order_[pos];
        if (pos > node.begin && radius_[pos] > radius_[pos - 1]) {
          return where + "leaf radii not in descending order";
        }
        if (radius_[pos] > node.radius) return where + "r_p exceeds radius";
        const double pn2 = items_->norm(p) * items_->norm(p);
        const double got =
            norm_cos_[pos] * norm_cos_[pos] + norm_sin_[pos] * norm_sin_[pos];
        if (std::abs(got - pn2) > 1e-5 * std::max(pn2, 1e-12)) {
          return where + "cone terms do not recompose |p|";
        }
      }
    } else {
      if (node.right == BcNode::kNone || node.left >= nodes_.size() ||
          node.right >= nodes_.size()) {
        return where + "internal node without two children";
      }
      const BcNode& l = nodes_[node.left];
      const BcNode& r = nodes_[node.right];
      if (l.begin != node.begin || l.end != r.begin || r.end != node.end) {
        return where + "children do not partition the node";
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
//  search
// ---------------------------------------------------------------------------

struct BcTree::SearchState {
  RelevanceCache& rel;
  DiversityCache& cache;
  std::span<const std::uint8_t> excluded;
  const SearchParams& params;
  SearchStats& stats;
  double q_norm;
  Candidate best;  // p* and tau

  // best.gain beats `bound` beyond rounding noise
  bool dominates(double bound, double slack) const {
    return best.found() && best.gain > bound + slack;
  }
};

inline Candidate BcTree::find_best(RelevanceCache& rel, DiversityCache& cache,
                                   std::span<const std::uint8_t> excluded,
                                   const SearchParams& params,
                                   SearchStats& stats) const {
  const QueryVector& q = rel.query();
  SearchState s{rel, cache, excluded, params, stats, q.norm, {}};
  const double ip = inner_product(center(0), q.view());
  subtree_search(s, 0, ip);
  return s.best;
}

inline void BcTree::subtree_search(SearchState& s, std::uint32_t idx,
                                   double ip) const {
  const BcNode& node = nodes_[idx];
  ++s.stats.nodes_visited;
  const double ub = node_ball_bound(ip, node.radius, s.q_norm, s.params);
  const double slack = kBoundSlack * s.params.relevance_coef() * s.q_norm *
                       (node.center_norm + node.radius);
  if (s.dominates(ub, slack)) {
    ++s.stats.nodes_pruned;
    s.stats.items_pruned_node += node.count();
    return;
  }
  if (node.is_leaf()) {
    filter_scan(s, node, ip);
    return;
  }
  const BcNode& l = nodes_[node.left];
  const BcNode& r = nodes_[node.right];
  const double ip_l = inner_product(center(node.left), s.rel.query().view());
  // centers are count-weighted means, so <q,c_R> follows from <q,c> and <q,c_L>
  const double ip_r =
      (static_cast<double>(node.count()) * ip -
       static_cast<double>(l.count()) * ip_l) /
      static_cast<double>(r.count());
  if (ip_l >= ip_r) {
    subtree_search(s, node.left, ip_l);
    subtree_search(s, node.right, ip_r);
  } else {
    subtree_search(s, node.right, ip_r);
    subtree_search(s, node.left, ip_l);
  }
}

inline void BcTree::filter_scan(SearchState& s, const BcNode& node,
                                double ip) const {
  const double rel_coef = s.params.relevance_coef();
  const double slack =
      kBoundSlack * rel_coef * s.q_norm * (node.center_norm + node.radius);
  const bool use_cone = node.center_norm > 0.0;
  const ConeTerms cone =
      use_cone ? cone_terms(ip, node.center_norm, s.q_norm) : ConeTerms{};

  for (std::uint32_t pos = node.begin; pos < node.end; ++pos) {
    const ItemId p = order_[pos];
    if (s.excluded[p]) continue;

    const double ub_ball = point_ball_bound(ip, radius_[pos], s.q_norm, s.params);
    if (s.dominates(ub_ball, slack)) {
      // radii descend, so every later item is bounded by ub_ball too
      for (std::uint32_t rest = pos; rest < node.end; ++rest) {
        s.stats.items_pruned_ball += s.excluded[order_[rest]] ? 0 : 1;
      }
      break;
    }
    if (use_cone) {
      const double ub_cone =
          point_cone_bound(cone, norm_cos_[pos], norm_sin_[pos], s.params);
      if (s.dominates(ub_cone, slack)) {
        ++s.stats.items_pruned_cone;
        continue;
      }
    }

    ++s.stats.items_scanned;
    const double ip_pq = s.rel(p);
    // Delta <= lambda/k <p,q> holds exactly in floating point, so the
    // diversity term is only worth computing when this can still win.
    if (s.best.found() && rel_coef * ip_pq < s.best.gain) continue;
    const double g = marginal_gain(p, ip_pq, s.params, s.cache);
    if (improves(s.best, g, p)) s.best = {p, g};
  }
}

// ---------------------------------------------------------------------------
//  tree-accelerated solvers
// ---------------------------------------------------------------------------

inline ResultSet bc_greedy(const BcTree& tree, const QueryVector& q,
                           const SearchParams& params) {
  return greedy_with(tree.items(), q, params, tree.finder());
}

inline ResultSet bc_dual_greedy(const BcTree& tree, const QueryVector& q,
                                const SearchParams& params) {
  return dual_greedy_with(tree.items(), q, params, tree.finder());
}

}  // namespace dkmips
