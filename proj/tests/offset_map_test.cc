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

#include "advspan/offset_map.h"

#include <gtest/gtest.h>

#include <stdexcept>

#include "advspan/rng.h"

namespace advspan::corpus {
namespace {

using text::Interval;

TEST(OffsetMapTest, IdentityMapsEverySpanToItself) {
  const OffsetMap map(10);
  EXPECT_TRUE(map.is_identity());
  EXPECT_EQ(map.Map({2, 5}), (Interval{2, 5}));
  EXPECT_EQ(map.rewritten_length(), 10u);
}

TEST(OffsetMapTest, ShiftsSpansAfterAnEdit) {
  const OffsetMap map = OffsetMap::FromEdits(20, {{{2, 4}, 5}});
  EXPECT_EQ(map.rewritten_length(), 23u);
  EXPECT_EQ(map.Map({0, 2}), (Interval{0, 2}));
  EXPECT_EQ(map.Map({4, 8}), (Interval{7, 11}));
  EXPECT_EQ(map.Map({3, 6}), std::nullopt);
}

TEST(OffsetMapTest, InsertionsInsideASpanBreakIt) {
  const OffsetMap map = OffsetMap::FromEdits(10, {{{5, 5}, 2}});
  EXPECT_EQ(map.Map({3, 7}), std::nullopt);
  EXPECT_EQ(map.Map({5, 8}), (Interval{7, 10}));
  EXPECT_EQ(map.Map({2, 5}), (Interval{2, 5}));
}

TEST(OffsetMapTest, RejectsOverlappingEdits) {
  EXPECT_THROW(OffsetMap::FromEdits(10, {{{1, 4}, 1}, {{3, 5}, 1}}), std::invalid_argument);
  EXPECT_THROW(OffsetMap::FromEdits(10, {{{8, 12}, 1}}), std::invalid_argument);
}

TEST(OffsetMapTest, SegmentsCoverTheText) {
  const OffsetMap map = OffsetMap::FromEdits(10, {{{2, 4}, 1}, {{7, 7}, 3}});
  const auto segments = map.Segments();
  std::size_t original = 0;
  std::size_t rewritten = 0;
  for (const Segment& s : segments) {
    EXPECT_EQ(s.original.begin, original);
    EXPECT_EQ(s.rewritten.begin, rewritten);
    original = s.original.end;
    rewritten = s.rewritten.end;
  }
  EXPECT_EQ(original, 10u);
  EXPECT_EQ(rewritten, map.rewritten_length());
}

// Applies random edits to a text whose characters are tagged with their
// original index (-1 for inserted text) and compares Compose against the
// tags.
std::vector<Edit> RandomEdits(Rng& rng, std::size_t length) {
  std::vector<Edit> edits;
  std::size_t pos = 0;
  while (pos <= length) {
    pos += rng.Below(6);
    if (pos > length) break;
    const std::size_t span = std::min<std::size_t>(rng.Below(3), length - pos);
    edits.push_back({{pos, pos + span}, static_cast<std::size_t>(rng.Below(4))});
    pos += span + 1;
  }
  return edits;
}

std::vector<long> Apply(const std::vector<long>& tags, const std::vector<Edit>& edits) {
  std::vector<long> out;
  std::size_t pos = 0;
  for (const Edit& e : edits) {
    out.insert(out.end(), tags.begin() + pos, tags.begin() + e.original.begin);
    out.insert(out.end(), e.replacement_length, -1);
    pos = e.original.end;
  }
  out.insert(out.end(), tags.begin() + pos, tags.end());
  return out;
}

std::optional<Interval> OracleMap(const std::vector<long>& tags, const Interval& span) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] != static_cast<long>(span.begin)) continue;
    for (std::size_t k = 0; k < span.size(); ++k) {
      if (i + k >= tags.size() || tags[i + k] != static_cast<long>(span.begin + k)) {
        return std::nullopt;
      }
    }
    return Interval{i, i + span.size()};
  }
  return std::nullopt;
}

TEST(OffsetMapTest, ComposeMatchesCharacterTracking) {
  Rng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t length = 5 + rng.Below(30);
    std::vector<long> tags(length);
    for (std::size_t i = 0; i < length; ++i) tags[i] = static_cast<long>(i);
    const auto first_edits = RandomEdits(rng, length);
    const OffsetMap first = OffsetMap::FromEdits(length, first_edits);
    const auto mid = Apply(tags, first_edits);
    ASSERT_EQ(mid.size(), first.rewritten_length());
    const auto second_edits = RandomEdits(rng, mid.size());
    const OffsetMap second = OffsetMap::FromEdits(mid.size(), second_edits);
    const auto final_tags = Apply(mid, second_edits);
    const OffsetMap composed = OffsetMap::Compose(first, second);
    ASSERT_EQ(composed.rewritten_length(), final_tags.size());
    for (std::size_t b = 0; b < length; ++b) {
      for (std::size_t e = b + 1; e <= length; ++e) {
        ASSERT_EQ(composed.Map({b, e}), OracleMap(final_tags, {b, e}))
            << "trial " << trial << " span [" << b << "," << e << ")";
      }
    }
  }
}

}  // namespace
}  // namespace advspan::corpus
