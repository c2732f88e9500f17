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

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dkmips/dataset.hpp"
#include "test_util.hpp"

namespace dkmips {
namespace {

using testing::TempDir;

TEST(InnerProductTest, MatchesHandValues) {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  EXPECT_DOUBLE_EQ(inner_product(a, b), 32.0);
  EXPECT_DOUBLE_EQ(l2_norm(std::span<const double>(a)), std::sqrt(14.0));
  EXPECT_DOUBLE_EQ(l2_distance(std::span<const double>(a),
                               std::span<const double>(b)),
                   std::sqrt(27.0));
}

TEST(InnerProductTest, DimensionMismatchThrows) {
  const std::vector<double> a{1, 2}, b{1, 2, 3};
  EXPECT_THROW(inner_product(a, b), DimensionError);
}

TEST(ItemMatrixTest, StoresRowsAndNorms) {
  const ItemMatrix m(2, 2, {3, 4, 0, 1});
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.dim(), 2u);
  EXPECT_DOUBLE_EQ(m.norm(0), 5.0);
  EXPECT_DOUBLE_EQ(m.ip(0, 1), 4.0);
  EXPECT_TRUE(m.non_negative());
}

TEST(ItemMatrixTest, RejectsNegativeWithRowAndColumn) {
  try {
    ItemMatrix(2, 2, {1, 1, 1, -0.5f});
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column 1"), std::string::npos) << msg;
  }
}

TEST(ItemMatrixTest, NegativeAllowedWhenValidationOff) {
  const ItemMatrix m(1, 2, {-1, 2}, false);
  EXPECT_FALSE(m.non_negative());
}

TEST(ItemMatrixTest, RejectsBadShapesAndNonFinite) {
  EXPECT_THROW(ItemMatrix(0, 2, {}), LoadError);
  EXPECT_THROW(ItemMatrix(2, 2, {1, 2, 3}), LoadError);
  EXPECT_THROW(ItemMatrix(1, 1, {NAN}), LoadError);
  EXPECT_THROW(ItemMatrix(1, 1, {INFINITY}), LoadError);
}

TEST(QueryVectorTest, NormAndDimensionCheck) {
  const QueryVector q({3, 4});
  EXPECT_DOUBLE_EQ(q.norm, 5.0);
  const ItemMatrix m(1, 3, {1, 1, 1});
  EXPECT_THROW(check_query_dim(m, q), DimensionError);
}

TEST(FormatTest, ParsesNamesAndExtensions) {
  EXPECT_EQ(parse_format("csv"), VectorFormat::kCsv);
  EXPECT_EQ(parse_format("bin"), VectorFormat::kBinary);
  EXPECT_FALSE(parse_format("npy").has_value());
  EXPECT_EQ(format_from_path("x/y.csv"), VectorFormat::kCsv);
  EXPECT_EQ(format_from_path("x/y.bin"), VectorFormat::kBinary);
}

TEST(CsvTest, LoadsMatrixSkippingBlankLines) {
  TempDir dir;
  const auto p = dir.write("a.csv", "1, 2\n\n3,4\r\n");
  const ItemMatrix m = load_items(p, VectorFormat::kCsv);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_FLOAT_EQ(m.row(1)[0], 3.0f);
  EXPECT_FLOAT_EQ(m.row(1)[1], 4.0f);
}

TEST(CsvTest, InconsistentWidthNamesTheRow) {
  TempDir dir;
  const auto p = dir.write("a.csv", "1,2\n3\n");
  try {
    load_items(p, VectorFormat::kCsv);
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("inconsistent width"), std::string::npos) << msg;
    EXPECT_NE(msg.find("row 1"), std::string::npos) << msg;
  }
}

TEST(CsvTest, BadNumberAndEmptyFileFail) {
  TempDir dir;
  EXPECT_THROW(load_items(dir.write("a.csv", "1,abc\n"), VectorFormat::kCsv),
               LoadError);
  EXPECT_THROW(load_items(dir.write("b.csv", ""), VectorFormat::kCsv),
               LoadError);
  EXPECT_THROW(load_items(dir.file("missing.csv"), VectorFormat::kCsv),
               LoadError);
}

TEST(CsvTest, NegativeItemReportsRowAndPath) {
  TempDir dir;
  const auto p = dir.write("a.csv", "1,2\n3,-4\n");
  try {
    load_items(p, VectorFormat::kCsv);
    FAIL();
  } catch (const LoadError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(p), std::string::npos);
    EXPECT_NE(msg.find("row 1"), std::string::npos);
  }
  EXPECT_NO_THROW(load_items(p, VectorFormat::kCsv, false));
}

TEST(BinaryTest, RoundTripsThroughBothFormats) {
  TempDir dir;
  const ItemMatrix m(3, 2, {0.25f, 1, 2, 3.5f, 0, 7});
  save_items(dir.file("m.bin"), VectorFormat::kBinary, m);
  save_items(dir.file("m.csv"), VectorFormat::kCsv, m);
  for (auto [path, fmt] : {std::pair{dir.file("m.bin"), VectorFormat::kBinary},
                           std::pair{dir.file("m.csv"), VectorFormat::kCsv}}) {
    const ItemMatrix back = load_items(path, fmt);
    EXPECT_EQ(back.size(), 3u);
    EXPECT_EQ(back.data(), m.data()) << path;
  }
}

TEST(BinaryTest, TruncatedAndBadHeaderFail) {
  TempDir dir;
  const ItemMatrix m(2, 2, {1, 2, 3, 4});
  save_items(dir.file("m.bin"), VectorFormat::kBinary, m);
  std::string bytes = testing::slurp(dir.file("m.bin"));
  const auto cut = dir.write("cut.bin", bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(load_items(cut, VectorFormat::kBinary), LoadError);
  bytes[0] = 'X';
  EXPECT_THROW(load_items(dir.write("bad.bin", bytes), VectorFormat::kBinary),
               LoadError);
  EXPECT_THROW(load_items(dir.write("empty.bin", ""), VectorFormat::kBinary),
               LoadError);
}

TEST(QueriesTest, DimensionMismatchAndNegativesAllowed) {
  TempDir dir;
  const auto p = dir.write("q.csv", "-1,0.5\n");
  const auto qs = load_queries(p, VectorFormat::kCsv, 2);
  ASSERT_EQ(qs.size(), 1u);
  EXPECT_DOUBLE_EQ(qs[0].coords[0], -1.0);
  EXPECT_THROW(load_queries(p, VectorFormat::kCsv, 3), DimensionError);
}

}  // namespace
}  // namespace dkmips
