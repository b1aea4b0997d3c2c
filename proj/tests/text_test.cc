// Copyright 2026 The advspan Authors.
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

#include "advspan/text.h"

#include <gtest/gtest.h>

#include "advspan/error.h"

namespace advspan::text {
namespace {

std::vector<std::string> Words(std::string_view s) { return TokenizeUtf8(s); }

TEST(Utf8Test, RoundTripsMultibyteText) {
  const std::string s = "naïve café Ωmega 😀";
  const std::u32string d = DecodeUtf8(s);
  EXPECT_EQ(d.size(), 18u);
  EXPECT_EQ(EncodeUtf8(d), s);
  EXPECT_EQ(CodepointLength(s), 18u);
}

TEST(Utf8Test, InvalidBytesReportTheirOffset) {
  const std::string s = std::string("ab") + '\xC3';
  try {
    DecodeUtf8(s);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location(), 2u);
    EXPECT_EQ(e.unit(), ParseError::Unit::kByte);
  }
  EXPECT_THROW(DecodeUtf8("\xED\xA0\x80"), ParseError);  // surrogate
}

TEST(TokenizeTest, KeepsApostrophesInsideWords) {
  EXPECT_EQ(Words("Don't stop, it’s fine."),
            (std::vector<std::string>{"Don't", "stop", "it’s", "fine"}));
}

TEST(TokenizeTest, SplitsNumbersOnPunctuation) {
  EXPECT_EQ(Words("1,304 yards"), (std::vector<std::string>{"1", "304", "yards"}));
}

TEST(TokenizeTest, OffsetsAreCodepoints) {
  const auto tokens = Tokenize(DecodeUtf8("café au lait"));
  ASSERT_EQ(tokens.size(), 3u);
  EXPECT_EQ(tokens[1].span, (Interval{5, 7}));
  EXPECT_EQ(tokens[2].span, (Interval{8, 12}));
}

TEST(TokenizeTest, EmptyAndPunctuationOnly) {
  EXPECT_TRUE(Words("").empty());
  EXPECT_TRUE(Words(" ... !? ").empty());
}

TEST(CaseTest, MapsNonAsciiLetters) {
  EXPECT_EQ(ToLowerUtf8("ÉCOLE Ωmega"), "école ωmega");
  EXPECT_EQ(ToUpper(U'ß'), U'ß');
  EXPECT_TRUE(IsUpper(U'Ω'));
  EXPECT_TRUE(IsLetter(U'ж'));
  EXPECT_FALSE(IsLetter(U'1'));
}

TEST(IntervalTest, MergeDropsEmptyAndJoinsTouching) {
  const auto merged = MergeIntervals({{5, 7}, {0, 2}, {2, 3}, {4, 4}, {6, 9}});
  EXPECT_EQ(merged, (std::vector<Interval>{{0, 3}, {5, 9}}));
}

TEST(IntervalTest, IntersectsAnyUsesHalfOpenBounds) {
  const std::vector<Interval> sorted = {{0, 3}, {5, 9}};
  EXPECT_TRUE(IntersectsAny({2, 4}, sorted));
  EXPECT_FALSE(IntersectsAny({3, 5}, sorted));
  EXPECT_TRUE(IntersectsAny({8, 20}, sorted));
  EXPECT_FALSE(IntersectsAny({9, 20}, sorted));
}

TEST(IntervalTest, IsAlphabetic) {
  EXPECT_TRUE(IsAlphabetic(U"Straße"));
  EXPECT_FALSE(IsAlphabetic(U"don't"));
  EXPECT_FALSE(IsAlphabetic(U"105"));
  EXPECT_FALSE(IsAlphabetic(U""));
}

}  // namespace
}  // namespace advspan::text
