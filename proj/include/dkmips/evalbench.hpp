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
// Recommendation-quality metrics (MMR, PCC, Cov) and timed parameter sweeps.
//
// Input files:
//   categories: "item_id,category_id" per line
//   ratings:    "user_id,item_id,rating" per line, rating in [0,5]
//
// A query at row i of the query file is user i in the ratings file.
//

#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dkmips/bctree.hpp"
#include "dkmips/dataset.hpp"
#include "dkmips/error.hpp"
#include "dkmips/objective.hpp"
#include "dkmips/solve.hpp"

namespace dkmips {

namespace detail {

// Splits a CSV line into exactly `want` trimmed fields.
inline std::vector<std::string_view> split_fields(std::string_view line,
                                                  std::size_t want,
                                                  const std::string& where) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos
                                            ? std::string_view::npos
                                            : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.size() != want) {
    throw LoadError(where + ": expected " + std::to_string(want) +
                    " fields, got " + std::to_string(out.size()));
  }
  return out;
}

template <class T>
T parse_field(std::string_view f, const std::string& where) {
  T v{};
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
    throw LoadError(where + ": bad value '" + std::string(f) + "'");
  }
  return v;
}

template <class OnRow>
void for_each_csv_line(const std::string& path, OnRow&& on_row) {
  std::ifstream in(path);
  if (!in) throw LoadError(path + ": cannot open file");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    on_row(body, path + ": line " + std::to_string(line_no));
  }
}

}  // namespace detail

// item -> set of categories, with category ids remapped to 0..size()-1.
class CategoryMap {
 public:
  CategoryMap() = default;

  CategoryMap(std::size_t n_items,
              const std::vector<std::pair<ItemId, std::uint64_t>>& pairs)
      : of_item_(n_items) {
    std::map<std::uint64_t, std::uint32_t> dense;
    for (const auto& [item, cat] : pairs) {
      if (item >= n_items) {
        throw LoadError("category entry for unknown item " +
                        std::to_string(item));
      }
      dense.emplace(cat, 0);
    }
    std::uint32_t next = 0;
    for (auto& [cat, idx] : dense) idx = next++;
    for (const auto& [item, cat] : pairs) of_item_[item].push_back(dense[cat]);
    for (auto& cats : of_item_) {
      std::sort(cats.begin(), cats.end());
      cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
    }
    num_categories_ = dense.size();
  }

  std::size_t num_items() const { return of_item_.size(); }
  std::size_t num_categories() const { return num_categories_; }
  std::span<const std::uint32_t> of(ItemId item) const {
    return item < of_item_.size() ? std::span<const std::uint32_t>(of_item_[item])
                                  : std::span<const std::uint32_t>();
  }

 private:
  std::vector<std::vector<std::uint32_t>> of_item_;
  std::size_t num_categories_ = 0;
};

inline CategoryMap load_categories(const std::string& path,
                                   std::size_t n_items) {
  std::vector<std::pair<ItemId, std::uint64_t>> pairs;
  detail::for_each_csv_line(path, [&](std::string_view line,
                                      const std::string& where) {
    const auto f = detail::split_fields(line, 2, where);
    const auto item = detail::parse_field<std::uint64_t>(f[0], where);
    const auto cat = detail::parse_field<std::uint64_t>(f[1], where);
    if (item >= n_items) {
      throw LoadError(where + ": item id " + std::to_string(item) +
                      " out of range (n=" + std::to_string(n_items) + ")");
    }
    pairs.emplace_back(static_cast<ItemId>(item), cat);
  });
  return CategoryMap(n_items, pairs);
}

struct Rating {
  ItemId item;
  double score;  // 0..5
};

class RatingsTable {
 public:
  void add(std::uint64_t user, ItemId item, double score) {
    if (!(score >= 0.0 && score <= 5.0)) {
      throw LoadError("rating " + std::to_string(score) +
                      " outside [0,5] for user " + std::to_string(user));
    }
    by_user_[user].push_back({item, score});
  }

  std::span<const Rating> of(std::uint64_t user) const {
    const auto it = by_user_.find(user);
    if (it == by_user_.end()) return {};
    return it->second;
  }

  std::size_t num_users() const { return by_user_.size(); }

 private:
  std::map<std::uint64_t, std::vector<Rating>> by_user_;
};

inline RatingsTable load_ratings(const std::string& path, std::size_t n_items) {
  RatingsTable table;
  detail::for_each_csv_line(path, [&](std::string_view line,
                                      const std::string& where) {
    const auto f = detail::split_fields(line, 3, where);
    const auto user = detail::parse_field<std::uint64_t>(f[0], where);
    const auto item = detail::parse_field<std::uint64_t>(f[1], where);
    const auto score = detail::parse_field<double>(f[2], where);
    if (item >= n_items) {
      throw LoadError(where + ": item id " + std::to_string(item) +
                      " out of range (n=" + std::to_string(n_items) + ")");
    }
    try {
      table.add(user, static_cast<ItemId>(item), score);
    } catch (const LoadError& e) {
      throw LoadError(where + ": " + e.what());
    }
  });
  return table;
}

// MMR: the configured objective re-evaluated from scratch on the result.
inline double mmr(const ItemMatrix& items, const ResultSet& result,
                  const QueryVector& q, const SearchParams& params) {
  return eval_f(items, result.items, q, params);
}

// Pearson correlation of two equally sized vectors; nullopt when either has
// zero variance.
inline std::optional<double> pearson(std::span<const double> a,
                                     std::span<const double> b) {
  const std::size_t m = a.size();
  if (m < 2 || b.size() != m) return std::nullopt;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= double(m);
  mb /= double(m);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
  return sab / std::sqrt(saa * sbb);
}

// Correlation between the rating-weighted category histogram of the user's
// rated items and the category histogram of the recommended items.
inline std::optional<double> pcc(std::span<const ItemId> result,
                                 std::uint64_t user,
                                 const CategoryMap& categories,
                                 const RatingsTable& ratings) {
  const auto rated = ratings.of(user);
  if (rated.empty()) return std::nullopt;
  std::vector<double> user_hist(categories.num_categories(), 0.0);
  std::vector<double> result_hist(categories.num_categories(), 0.0);
  for (const Rating& r : rated) {
    for (auto c : categories.of(r.item)) user_hist[c] += r.score;
  }
  for (ItemId p : result) {
    for (auto c : categories.of(p)) result_hist[c] += 1.0;
  }
  return pearson(user_hist, result_hist);
}

// Fraction of the user's categories that the result touches.
inline std::optional<double> cov(std::span<const ItemId> result,
                                 std::uint64_t user,
                                 const CategoryMap& categories,
                                 const RatingsTable& ratings) {
  std::vector<std::uint8_t> in_user(categories.num_categories(), 0);
  std::size_t user_total = 0;
  for (const Rating& r : ratings.of(user)) {
    for (auto c : categories.of(r.item)) {
      if (!in_user[c]) {
        in_user[c] = 1;
        ++user_total;
      }
    }
  }
  if (user_total == 0) return std::nullopt;
  std::size_t hit = 0;
  for (ItemId p : result) {
    for (auto c : categories.of(p)) {
      if (in_user[c] == 1) {
        in_user[c] = 2;
        ++hit;
      }
    }
  }
  return double(hit) / double(user_total);
}

// ---------------------------------------------------------------------------
//  sweeps
// ---------------------------------------------------------------------------

struct BenchGrid {
  std::vector<Algorithm> algos{Algorithm::kLinear, Algorithm::kBcGreedy};
  std::vector<Mode> modes{Mode::kAvg};
  std::vector<double> lambdas{0.5};
  std::vector<std::size_t> ks{10};
  std::optional<double> mu;  // per-mode default when unset
  std::size_t repetitions = 1;
  std::size_t leaf_size = kDefaultLeafSize;
  std::uint64_t seed = kDefaultSeed;
};

struct QualityInputs {
  const CategoryMap* categories = nullptr;
  const RatingsTable* ratings = nullptr;

  bool enabled() const { return categories != nullptr && ratings != nullptr; }
};

struct BenchRow {
  Algorithm algo = Algorithm::kLinear;
  Mode mode = Mode::kAvg;
  double lambda = 0.0;
  double mu = 0.0;
  std::size_t k = 0;
  double mean_time_ms = 0.0;
  double mean_mmr = 0.0;
  double items_scanned_frac = 0.0;
  std::optional<double> mean_pcc;
  std::optional<double> mean_cov;
  std::size_t pcc_nulls = 0;  // queries whose PCC was undefined
  std::size_t cov_nulls = 0;
};

// Runs every (mode, lambda, k, algo) cell over all queries `repetitions`
// times. Timing covers the query phase only; the tree is built beforehand.
inline std::vector<BenchRow> bench_sweep(const ItemMatrix& items,
                                         std::span<const QueryVector> queries,
                                         const BenchGrid& grid,
                                         QualityInputs quality = {}) {
  if (queries.empty()) throw ParamError("bench needs at least one query");
  if (grid.repetitions < 1) throw ParamError("repetitions must be >= 1");
  for (const auto& q : queries) check_query_dim(items, q);

  std::optional<BcTree> tree;
  if (std::any_of(grid.algos.begin(), grid.algos.end(), uses_tree)) {
    tree.emplace(BcTree::build(items, grid.leaf_size, grid.seed));
  }

  std::vector<BenchRow> rows;
  for (Mode mode : grid.modes) {
    for (double lambda : grid.lambdas) {
      for (std::size_t k : grid.ks) {
        for (Algorithm algo : grid.algos) {
          SearchParams params{k, lambda, grid.mu.value_or(default_mu(mode)),
                              mode};
          params.validate();
          BenchRow row;
          row.algo = algo;
          row.mode = mode;
          row.lambda = lambda;
          row.mu = params.mu;
          row.k = k;
          double total_ms = 0.0, total_mmr = 0.0;
          double scanned = 0.0, scan_budget = 0.0;
          double pcc_sum = 0.0, cov_sum = 0.0;
          std::size_t pcc_n = 0, cov_n = 0;
          for (std::size_t rep = 0; rep < grid.repetitions; ++rep) {
            for (std::size_t qi = 0; qi < queries.size(); ++qi) {
              const auto t0 = std::chrono::steady_clock::now();
              const ResultSet res = solve(algo, items, tree ? &*tree : nullptr,
                                          queries[qi], params);
              const auto t1 = std::chrono::steady_clock::now();
              total_ms +=
                  std::chrono::duration<double, std::milli>(t1 - t0).count();
              total_mmr += mmr(items, res, queries[qi], params);
              if (uses_tree(algo)) {
                scanned += double(res.stats.items_scanned);
                scan_budget += double(res.stats.steps) * double(items.size());
              }
              if (rep == 0 && quality.enabled()) {
                if (auto v = pcc(res.items, qi, *quality.categories,
                                 *quality.ratings)) {
                  pcc_sum += *v;
                  ++pcc_n;
                } else {
                  ++row.pcc_nulls;
                }
                if (auto v = cov(res.items, qi, *quality.categories,
                                 *quality.ratings)) {
                  cov_sum += *v;
                  ++cov_n;
                } else {
                  ++row.cov_nulls;
                }
              }
            }
          }
          const double runs = double(grid.repetitions * queries.size());
          row.mean_time_ms = total_ms / runs;
          row.mean_mmr = total_mmr / runs;
          row.items_scanned_frac = scan_budget > 0.0 ? scanned / scan_budget : 0.0;
          if (pcc_n) row.mean_pcc = pcc_sum / double(pcc_n);
          if (cov_n) row.mean_cov = cov_sum / double(cov_n);
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

inline void write_bench_csv(std::ostream& os, std::span<const BenchRow> rows,
                            bool with_quality) {
  os << "algo,mode,lambda,mu,k,mean_time_ms,mean_mmr,items_scanned_frac";
  if (with_quality) os << ",mean_pcc,mean_cov";
  os << '\n';
  os << std::setprecision(10);
  for (const BenchRow& r : rows) {
    os << algorithm_name(r.algo) << ',' << mode_name(r.mode) << ','
       << r.lambda << ',' << r.mu << ',' << r.k << ',' << r.mean_time_ms << ','
       << r.mean_mmr << ',' << r.items_scanned_frac;
    if (with_quality) {
      os << ',';
      if (r.mean_pcc) os << *r.mean_pcc;
      os << ',';
      if (r.mean_cov) os << *r.mean_cov;
    }
    os << '\n';
  }
}

}  // namespace dkmips
