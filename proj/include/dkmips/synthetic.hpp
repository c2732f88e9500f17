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

// Random non-negative instances for property checks and benchmarks.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "dkmips/dataset.hpp"

namespace dkmips::synthetic {

// i.i.d. uniform [0, 1) coordinates.
inline ItemMatrix uniform_items(std::size_t n, std::size_t d,
                                std::mt19937_64& rng) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> data(n * d);
  for (float& v : data) v = u(rng);
  return ItemMatrix(n, d, std::move(data));
}

inline QueryVector uniform_query(std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(d);
  for (double& v : c) v = u(rng);
  return QueryVector(std::move(c));
}

//
// Factor-model style vectors: each vector draws a handful of active latent
// dimensions (most coordinates are zero) with exponential weights, then is
// scaled by a log-normal popularity factor. This mimics the sparse, skewed
// embeddings a non-negative factorization produces.
//
struct FactorModel {
  std::size_t active = 8;     // expected non-zero coordinates per vector
  double norm_sigma = 0.5;    // log-normal spread of vector norms
};

inline std::vector<double> factor_vector(std::size_t d, const FactorModel& m,
                                         std::mt19937_64& rng) {
  std::vector<double> v(d, 0.0);
  const double keep = std::min(1.0, double(m.active) / double(d));
  std::bernoulli_distribution active(keep);
  std::exponential_distribution<double> weight(1.0);
  std::lognormal_distribution<double> scale(0.0, m.norm_sigma);
  bool any = false;
  for (double& x : v) {
    if (active(rng)) {
      x = weight(rng);
      any = true;
    }
  }
  if (!any) v[std::uniform_int_distribution<std::size_t>(0, d - 1)(rng)] = weight(rng);
  const double s = scale(rng);
  for (double& x : v) x *= s;
  return v;
}

inline ItemMatrix factor_items(std::size_t n, std::size_t d,
                               std::mt19937_64& rng, FactorModel m = {}) {
  std::vector<float> data;
  data.reserve(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (double x : factor_vector(d, m, rng)) data.push_back(float(x));
  }
  return ItemMatrix(n, d, std::move(data));
}

inline QueryVector factor_query(std::size_t d, std::mt19937_64& rng,
                                FactorModel m = {}) {
  return QueryVector(factor_vector(d, m, rng));
}

}  // namespace dkmips::synthetic
