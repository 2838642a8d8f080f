// Copyright 2026 The Audiomark Authors. All Rights Reserved.
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

#include <set>

#include "audiomark/bits.h"
#include "audiomark/errors.h"
#include "audiomark/random.h"
#include "gtest/gtest.h"

namespace audiomark {
namespace {

TEST(WatermarkBitsTest, StringRoundTripAndOps) {
  const WatermarkBits b = WatermarkBits::FromString("1011");
  EXPECT_EQ(b.ToString(), "1011");
  EXPECT_EQ(b.Complement().ToString(), "0100");
  EXPECT_EQ(b.Concat(WatermarkBits::FromString("01")).ToString(), "101101");
  EXPECT_EQ(b.Slice(1, 2).ToString(), "01");
  EXPECT_THROW(WatermarkBits::FromString("10a1"), Error);
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(Seed{42}), b(Seed{42});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
  Rng c(Seed{42}), d(Seed{42});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(c.Gaussian(), d.Gaussian());
}

TEST(RngTest, UniformIndexInRange) {
  Rng rng(Seed{1});
  for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.UniformIndex(7), 7u);
}

TEST(RngTest, GaussianMoments) {
  Rng rng(Seed{3});
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.Gaussian();
    sum += g;
    sq += g * g;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(SeedTest, DerivationIsStableAndSpreads) {
  EXPECT_EQ(DeriveSeed(Seed{7}, "nobox"), DeriveSeed(Seed{7}, "nobox"));
  EXPECT_NE(DeriveSeed(Seed{7}, "nobox"), DeriveSeed(Seed{7}, "attack"));
  // Tag derivation is the seed XOR the tag's stable hash.
  EXPECT_EQ(DeriveSeed(Seed{7}, "x").value, 7u ^ StableHash("x"));
  // FNV-1a 64 reference values.
  EXPECT_EQ(StableHash(""), 14695981039346656037ull);
  EXPECT_EQ(StableHash("a"), 0xaf63dc4c8601ec8cull);
  std::set<uint64_t> seen;
  for (uint64_t i = 0; i < 1000; ++i) seen.insert(DeriveSeed(Seed{7}, i).value);
  EXPECT_EQ(seen.size(), 1000u);
}

}  // namespace
}  // namespace audiomark
