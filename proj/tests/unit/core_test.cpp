/*
 * Copyright 2026 The MTMT Uplift Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "core/error.hpp"
#include "core/format.hpp"
#include "core/random.hpp"

namespace mtmt {
namespace {

TEST(RngTest, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  Rng c(42), d(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(c.normal(), d.normal());
}

TEST(RngTest, DerivedStreamsDiffer) {
  EXPECT_NE(derive_seed(7, 1), derive_seed(7, 2));
  EXPECT_NE(derive_seed(7, 1), derive_seed(8, 1));
  EXPECT_EQ(derive_seed(7, 1), derive_seed(7, 1));
}

TEST(RngTest, UniformRangeAndMoments) {
  Rng rng(3);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(RngTest, NormalMoments) {
  Rng rng(5);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(RngTest, BelowIsInRangeAndCoversAllValues) {
  Rng rng(9);
  std::set<uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const uint64_t v = rng.below(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(RngTest, CategoricalFollowsWeights) {
  Rng rng(11);
  const std::vector<double> p{0.2, 0.8};
  int ones = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ones += rng.categorical(p) == 1 ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(ones) / n, 0.8, 0.01);
}

TEST(RngTest, PermutationIsAPermutation) {
  Rng rng(1);
  auto p = permutation(50, rng);
  std::vector<size_t> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
  Rng again(1);
  EXPECT_EQ(permutation(50, again), p);
}

TEST(FormatTest, DoublesRoundTripExactly) {
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-20, 20));
    double back = 0.0;
    ASSERT_TRUE(parse_double(format_double(v), &back));
    EXPECT_EQ(back, v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-2.0), "-2");
}

TEST(FormatTest, ParseRejectsGarbage) {
  double v = 0.0;
  EXPECT_FALSE(parse_double("", &v));
  EXPECT_FALSE(parse_double("1.2.3", &v));
  EXPECT_FALSE(parse_double("abc", &v));
  EXPECT_FALSE(parse_double("nan", &v));
  EXPECT_TRUE(parse_double(" 2.5 ", &v));
  EXPECT_EQ(v, 2.5);
  EXPECT_TRUE(parse_double("+1e3", &v));
  EXPECT_EQ(v, 1000.0);
  long long k = 0;
  EXPECT_TRUE(parse_int("12", &k));
  EXPECT_EQ(k, 12);
  EXPECT_FALSE(parse_int("1.5", &k));
}

TEST(FormatTest, FnvKnownVectors) {
  const std::string empty;
  EXPECT_EQ(fnv1a({}), 0xcbf29ce484222325ULL);
  const std::string a = "a";
  EXPECT_EQ(fnv1a(std::span(reinterpret_cast<const unsigned char*>(a.data()), a.size())),
            0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex_digest(0xabcULL), "0000000000000abc");
}

TEST(ErrorTest, KindIsCarriedAndNamed) {
  try {
    fail(ErrorKind::kSchema, "missing column");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSchema);
    EXPECT_NE(std::string(e.what()).find("missing column"), std::string::npos);
  }
  EXPECT_NO_THROW(check(true, ErrorKind::kData, "never"));
  EXPECT_THROW(check(false, ErrorKind::kData, "always"), Error);
}

}  // namespace
}  // namespace mtmt
