// Copyright 2026 The ELA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <set>

#include <gtest/gtest.h>

#include "ela/common/csv.h"
#include "ela/common/error.h"
#include "ela/common/rng.h"

namespace ela {
namespace {

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.Uniform(), b.Uniform());
    EXPECT_EQ(a.Normal(), b.Normal());
  }
}

TEST(Rng, NamedAndIndexedSubstreamsDiffer) {
  std::set<std::uint64_t> seeds;
  for (const char* name : {"data", "model", "eval", "el", "policy"}) {
    seeds.insert(DeriveSeed(7, name));
  }
  for (std::uint64_t i = 0; i < 100; ++i) seeds.insert(DeriveSeed(7, i));
  EXPECT_EQ(seeds.size(), 105u);
  EXPECT_NE(DeriveSeed(7, "data"), DeriveSeed(8, "data"));
}

TEST(Rng, PermutationIsAPermutation) {
  Rng rng(3);
  for (int n : {0, 1, 2, 17}) {
    std::vector<int> p = rng.Permutation(n);
    std::sort(p.begin(), p.end());
    for (int i = 0; i < n; ++i) EXPECT_EQ(p[i], i);
  }
}

TEST(Rng, UniformIntCoversRangeEvenly) {
  Rng rng(5);
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 40000; ++i) ++counts[rng.UniformInt(4)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

TEST(Rng, CategoricalFollowsWeights) {
  Rng rng(9);
  const std::vector<double> w = {1.0, 0.0, 3.0};
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 40000; ++i) ++counts[rng.Categorical(w)];
  EXPECT_EQ(counts[1], 0);
  EXPECT_NEAR(counts[2] / 40000.0, 0.75, 0.01);
}

TEST(Csv, RoundTripsAndKeepsComment) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "ela_csv_roundtrip.csv").string();
  CsvTable t;
  t.comment = "format_version=1 seed=3";
  t.header = {"a", "b"};
  t.rows = {{"1", FormatDouble(0.1)}, {"2", FormatDouble(-1e-300)}};
  WriteCsv(path, t);
  const CsvTable back = ReadCsv(path);
  EXPECT_EQ(back.comment, t.comment);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(ParseDouble(back.rows[0][1]), 0.1);
  EXPECT_EQ(back.Column("b"), 1);
  EXPECT_THROW(back.Column("c"), Error);
}

TEST(Csv, RejectsUnsafeFieldsAndRaggedRows) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "ela_csv_bad.csv").string();
  CsvTable t;
  t.header = {"a"};
  t.rows = {{"x,y"}};
  EXPECT_THROW(WriteCsv(path, t), Error);
  t.rows = {{"1", "2"}};
  EXPECT_THROW(WriteCsv(path, t), Error);
}

TEST(Csv, FormatDoubleRoundTripsExactly) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.Normal() * std::pow(10.0, rng.UniformInt(20) - 10);
    EXPECT_EQ(ParseDouble(FormatDouble(x)), x);
  }
  EXPECT_THROW(ParseDouble("1.5x"), Error);
  EXPECT_THROW(ParseInt("12.0"), Error);
  EXPECT_EQ(ParseInt("-12"), -12);
}

}  // namespace
}  // namespace ela
