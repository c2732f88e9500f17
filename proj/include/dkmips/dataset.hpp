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
// Item/query storage and vector file I/O.
//
// Items are kept as row-major 32-bit floats; every dot product and norm is
// accumulated in 64-bit. Two on-disk formats are understood:
//
//   binary: "DKMV" | u32 LE n | u32 LE d | n*d f32 LE, row-major
//   csv:    one vector per line, comma-separated decimals, no header
//

#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dkmips/error.hpp"

namespace dkmips {

using ItemId = std::uint32_t;
inline constexpr ItemId kNoItem = std::numeric_limits<ItemId>::max();

// Sum of a_i * b_i accumulated in double.
template <class A, class B>
double inner_product(std::span<const A> a, std::span<const B> b) {
  if (a.size() != b.size()) {
    throw DimensionError("inner product of vectors with dimensions " +
                         std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

template <class A, class B>
double inner_product(const std::vector<A>& a, const std::vector<B>& b) {
  return inner_product(std::span<const A>(a), std::span<const B>(b));
}

template <class A>
double l2_norm(std::span<const A> a) {
  return std::sqrt(inner_product(a, a));
}

// Euclidean distance, accumulated in double.
template <class A, class B>
double l2_distance(std::span<const A> a, std::span<const B> b) {
  if (a.size() != b.size()) {
    throw DimensionError("distance between vectors with dimensions " +
                         std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

// n items of dimension d, immutable after construction.
class ItemMatrix {
 public:
  ItemMatrix() = default;

  ItemMatrix(std::size_t n, std::size_t d, std::vector<float> data,
             bool validate_nonneg = true)
      : n_(n), d_(d), data_(std::move(data)) {
    if (n_ == 0 || d_ == 0) {
      throw LoadError("item matrix needs n >= 1 and d >= 1 (got n=" +
                      std::to_string(n_) + ", d=" + std::to_string(d_) + ")");
    }
    if (data_.size() != n_ * d_) {
      throw LoadError("item matrix holds " + std::to_string(data_.size()) +
                      " values, expected n*d = " + std::to_string(n_ * d_));
    }
    norms_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto r = row(static_cast<ItemId>(i));
      for (std::size_t j = 0; j < d_; ++j) {
        if (!std::isfinite(r[j])) {
          throw LoadError("row " + std::to_string(i) +
                          ": non-finite coordinate at column " +
                          std::to_string(j));
        }
        if (validate_nonneg && r[j] < 0.0f) {
          throw LoadError("row " + std::to_string(i) +
                          ": negative coordinate at column " +
                          std::to_string(j));
        }
      }
      norms_[i] = l2_norm(r);
    }
    nonneg_ = true;
    for (float v : data_) {
      if (v < 0.0f) {
        nonneg_ = false;
        break;
      }
    }
  }

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }

  std::span<const float> row(ItemId i) const {
    return {data_.data() + static_cast<std::size_t>(i) * d_, d_};
  }
  double norm(ItemId i) const { return norms_[i]; }

  // True when every coordinate is >= 0; the tree bounds rely on it.
  bool non_negative() const { return nonneg_; }

  const std::vector<float>& data() const { return data_; }
  const std::vector<double>& norms() const { return norms_; }

  double ip(ItemId a, ItemId b) const { return inner_product(row(a), row(b)); }

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<float> data_;
  std::vector<double> norms_;
  bool nonneg_ = true;
};

struct QueryVector {
  std::vector<double> coords;
  double norm = 0.0;

  QueryVector() = default;
  explicit QueryVector(std::vector<double> c)
      : coords(std::move(c)), norm(l2_norm(std::span<const double>(coords))) {}

  std::size_t dim() const { return coords.size(); }
  std::span<const double> view() const { return coords; }
};

inline void check_query_dim(const ItemMatrix& items, const QueryVector& q) {
  if (q.dim() != items.dim()) {
    throw DimensionError("query has dimension " + std::to_string(q.dim()) +
                         " but items have dimension " +
                         std::to_string(items.dim()));
  }
}

// ---------------------------------------------------------------------------
//  file formats
// ---------------------------------------------------------------------------

enum class VectorFormat { kBinary, kCsv };

inline constexpr std::array<char, 4> kBinaryMagic = {'D', 'K', 'M', 'V'};

inline std::string_view format_name(VectorFormat f) {
  return f == VectorFormat::kBinary ? "binary" : "csv";
}

// "bin"/"binary" or "csv"; anything else is nullopt.
inline std::optional<VectorFormat> parse_format(std::string_view s) {
  if (s == "bin" || s == "binary") return VectorFormat::kBinary;
  if (s == "csv") return VectorFormat::kCsv;
  return std::nullopt;
}

// Guess from the extension: ".csv" is CSV, everything else binary.
inline VectorFormat format_from_path(std::string_view path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    return VectorFormat::kCsv;
  }
  return VectorFormat::kBinary;
}

// Rows as parsed from disk, before any item/query interpretation.
struct RawMatrix {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> values;  // row-major
};

namespace detail {

inline std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void write_u32_le(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {
      static_cast<unsigned char>(v & 0xffu),
      static_cast<unsigned char>((v >> 8) & 0xffu),
      static_cast<unsigned char>((v >> 16) & 0xffu),
      static_cast<unsigned char>((v >> 24) & 0xffu)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path + ": cannot open file");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw LoadError(path + ": read failed");
  return bytes;
}

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline RawMatrix read_binary(const std::string& path) {
  const auto bytes = read_file(path);
  if (bytes.empty()) throw LoadError(path + ": empty file");
  if (bytes.size() < 12 ||
      !std::equal(kBinaryMagic.begin(), kBinaryMagic.end(), bytes.begin())) {
    throw LoadError(path + ": missing DKMV header");
  }
  RawMatrix m;
  m.n = read_u32_le(bytes.data() + 4);
  m.d = read_u32_le(bytes.data() + 8);
  if (m.n == 0 || m.d == 0) {
    throw LoadError(path + ": header declares n=" + std::to_string(m.n) +
                    ", d=" + std::to_string(m.d));
  }
  const std::size_t count = m.n * m.d;
  const std::size_t payload = bytes.size() - 12;
  if (payload != count * 4) {
    const std::size_t full_rows = payload / (4 * m.d);
    throw LoadError(path + ": expected " + std::to_string(count) +
                    " floats but file holds " + std::to_string(payload / 4) +
                    " (row " + std::to_string(full_rows) +
                    " is incomplete or trailing bytes present)");
  }
  m.values.resize(count);
  const unsigned char* p = bytes.data() + 12;
  for (std::size_t i = 0; i < count; ++i, p += 4) {
    m.values[i] = static_cast<double>(std::bit_cast<float>(read_u32_le(p)));
  }
  return m;
}

inline RawMatrix read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path + ": cannot open file");
  RawMatrix m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    std::size_t width = 0;
    std::size_t pos = 0;
    while (true) {
      const auto comma = body.find(',', pos);
      const auto field = trim(body.substr(
          pos, comma == std::string_view::npos ? std::string_view::npos
                                               : comma - pos));
      double v = 0.0;
      const auto* first = field.data();
      const auto* last = field.data() + field.size();
      if (!field.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (field.empty() || ec != std::errc() || ptr != last) {
        throw LoadError(path + ": row " + std::to_string(m.n) + " (line " +
                        std::to_string(line_no) + "): bad number '" +
                        std::string(field) + "'");
      }
      m.values.push_back(v);
      ++width;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (m.n == 0) {
      m.d = width;
    } else if (width != m.d) {
      throw LoadError(path + ": row " + std::to_string(m.n) + " (line " +
                      std::to_string(line_no) + ") has " +
                      std::to_string(width) + " values, expected " +
                      std::to_string(m.d) + " (inconsistent width)");
    }
    ++m.n;
  }
  if (m.n == 0) throw LoadError(path + ": empty file");
  return m;
}

}  // namespace detail

inline RawMatrix read_matrix(const std::string& path, VectorFormat format) {
  return format == VectorFormat::kBinary ? detail::read_binary(path)
                                         : detail::read_csv(path);
}

// Writes row-major values; binary output rounds to float.
inline void write_matrix(const std::string& path, VectorFormat format,
                         std::size_t n, std::size_t d,
                         std::span<const double> values) {
  if (values.size() != n * d) {
    throw DimensionError("write_matrix: value count does not match n*d");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError(path + ": cannot open for writing");
  if (format == VectorFormat::kBinary) {
    out.write(kBinaryMagic.data(), 4);
    detail::write_u32_le(out, static_cast<std::uint32_t>(n));
    detail::write_u32_le(out, static_cast<std::uint32_t>(d));
    for (double v : values) {
      detail::write_u32_le(out,
                           std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  } else {
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        if (j) out << ',';
        out << values[i * d + j];
      }
      out << '\n';
    }
  }
  if (!out) throw LoadError(path + ": write failed");
}

inline void save_items(const std::string& path, VectorFormat format,
                       const ItemMatrix& items) {
  std::vector<double> v(items.data().begin(), items.data().end());
  write_matrix(path, format, items.size(), items.dim(), v);
}

inline ItemMatrix load_items(const std::string& path, VectorFormat format,
                             bool validate_nonneg = true) {
  RawMatrix raw = read_matrix(path, format);
  std::vector<float> data(raw.values.size());
  for (std::size_t i = 0; i < raw.values.size(); ++i) {
    data[i] = static_cast<float>(raw.values[i]);
  }
  try {
    return ItemMatrix(raw.n, raw.d, std::move(data), validate_nonneg);
  } catch (const LoadError& e) {
    throw LoadError(path + ": " + e.what());
  }
}

// Queries may hold negative coordinates. expected_dim, when given, is the
// item dimensionality the queries must match.
inline std::vector<QueryVector> load_queries(
    const std::string& path, VectorFormat format,
    std::optional<std::size_t> expected_dim = std::nullopt) {
  RawMatrix raw = read_matrix(path, format);
  if (expected_dim && *expected_dim != raw.d) {
    throw DimensionError(path + ": queries have dimension " +
                         std::to_string(raw.d) + " but items have dimension " +
                         std::to_string(*expected_dim));
  }
  std::vector<QueryVector> out;
  out.reserve(raw.n);
  for (std::size_t i = 0; i < raw.n; ++i) {
    std::vector<double> c(raw.values.begin() + i * raw.d,
                          raw.values.begin() + (i + 1) * raw.d);
    for (double v : c) {
      if (!std::isfinite(v)) {
        throw LoadError(path + ": row " + std::to_string(i) +
                        ": non-finite coordinate");
      }
    }
    out.emplace_back(std::move(c));
  }
  return out;
}

}  // namespace dkmips
