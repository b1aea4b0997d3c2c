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

#ifndef ADVSPAN_TEXT_H_
#define ADVSPAN_TEXT_H_

// Codepoint-level text utilities shared by every module: UTF-8 conversion,
// character classes, case mapping, and the word tokenizer.
//
// All offsets in this project are codepoint offsets into the decoded text.

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace advspan::text {

// Half-open codepoint interval [begin, end).
struct Interval {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  bool intersects(const Interval& other) const {
    return begin < other.end && other.begin < end;
  }
  bool contains(const Interval& other) const {
    return begin <= other.begin && other.end <= end;
  }

  auto operator<=>(const Interval&) const = default;
};

// Throws ParseError (byte offset) on malformed UTF-8.
std::u32string DecodeUtf8(std::string_view bytes);
std::string EncodeUtf8(std::u32string_view codepoints);
std::string EncodeUtf8(char32_t codepoint);
std::size_t CodepointLength(std::string_view bytes);

bool IsLetter(char32_t c);
bool IsDigit(char32_t c);
bool IsApostrophe(char32_t c);
// Letters, decimal digits and apostrophes; the tokenizer's token alphabet.
bool IsWordChar(char32_t c);
bool IsSpace(char32_t c);
bool IsUpper(char32_t c);
bool IsLower(char32_t c);

char32_t ToLower(char32_t c);
char32_t ToUpper(char32_t c);
std::u32string ToLower(std::u32string_view s);
std::u32string ToUpper(std::u32string_view s);
std::string ToLowerUtf8(std::string_view s);

struct Token {
  Interval span;
  std::u32string text;
};

// Maximal runs of letters, digits and apostrophes; everything else separates.
std::vector<Token> Tokenize(std::u32string_view s);
std::vector<std::string> TokenizeUtf8(std::string_view s);

bool IsAlphabetic(std::u32string_view s);

// Sorts and merges overlapping or touching intervals. Empty intervals are
// dropped.
std::vector<Interval> MergeIntervals(std::vector<Interval> intervals);

// `sorted` must be the output of MergeIntervals.
bool IntersectsAny(const Interval& candidate,
                   const std::vector<Interval>& sorted);

std::u32string Slice(std::u32string_view s, const Interval& span);

}  // namespace advspan::text

#endif  // ADVSPAN_TEXT_H_
