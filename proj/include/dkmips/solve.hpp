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

#pragma once

#include <optional>
#include <string_view>

#include "dkmips/bctree.hpp"
#include "dkmips/dataset.hpp"
#include "dkmips/error.hpp"
#include "dkmips/greedy.hpp"
#include "dkmips/objective.hpp"

namespace dkmips {

enum class Algorithm { kLinear, kGreedy, kDual, kBcGreedy, kBcDual };

inline std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kLinear: return "linear";
    case Algorithm::kGreedy: return "greedy";
    case Algorithm::kDual: return "dual";
    case Algorithm::kBcGreedy: return "bc-greedy";
    default: return "bc-dual";
  }
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
  if (s == "linear") return Algorithm::kLinear;
  if (s == "greedy") return Algorithm::kGreedy;
  if (s == "dual") return Algorithm::kDual;
  if (s == "bc-greedy") return Algorithm::kBcGreedy;
  if (s == "bc-dual") return Algorithm::kBcDual;
  return std::nullopt;
}

inline std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "avg") return Mode::kAvg;
  if (s == "max") return Mode::kMax;
  return std::nullopt;
}

inline bool uses_tree(Algorithm a) {
  return a == Algorithm::kBcGreedy || a == Algorithm::kBcDual;
}

// Scaling factor used when none is given: 0.05 for avg, 0.001 for max.
inline double default_mu(Mode m) { return m == Mode::kAvg ? 0.05 : 0.001; }

// `tree` may be null unless a bc-* algorithm is requested.
inline ResultSet solve(Algorithm algo, const ItemMatrix& items,
                       const BcTree* tree, const QueryVector& q,
                       const SearchParams& params) {
  if (uses_tree(algo) && tree == nullptr) {
    throw LogicError("tree-based algorithm requested without a BC-Tree");
  }
  switch (algo) {
    case Algorithm::kLinear: return linear_topk(items, q, params);
    case Algorithm::kGreedy: return greedy(items, q, params);
    case Algorithm::kDual: return dual_greedy(items, q, params);
    case Algorithm::kBcGreedy: return bc_greedy(*tree, q, params);
    default: return bc_dual_greedy(*tree, q, params);
  }
}

}  // namespace dkmips
