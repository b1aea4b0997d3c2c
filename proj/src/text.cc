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

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>

#include "advspan/error.h"

namespace advspan::text {

std::u32string DecodeUtf8(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  const auto* data = reinterpret_cast<const uint8_t*>(bytes.data());
  const auto length = static_cast<int32_t>(bytes.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(data, i, length, c);
    if (c < 0) {
      throw ParseError("malformed UTF-8", static_cast<std::size_t>(start),
                       ParseError::Unit::kByte);
    }
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::string EncodeUtf8(std::u32string_view codepoints) {
  std::string out;
  out.reserve(codepoints.size());
  for (char32_t c : codepoints) out += EncodeUtf8(c);
  return out;
}

std::string EncodeUtf8(char32_t codepoint) {
  uint8_t buffer[U8_MAX_LENGTH];
  int32_t length = 0;
  UBool error = false;
  U8_APPEND(buffer, length, U8_MAX_LENGTH, static_cast<UChar32>(codepoint),
            error);
  if (error) {
    // Surrogates and out-of-range values cannot be encoded.
    return "\xEF\xBF\xBD";
  }
  return std::string(reinterpret_cast<const char*>(buffer),
                     static_cast<std::size_t>(length));
}

std::size_t CodepointLength(std::string_view bytes) {
  return DecodeUtf8(bytes).size();
}

bool IsLetter(char32_t c) { return u_isalpha(static_cast<UChar32>(c)); }

bool IsDigit(char32_t c) { return u_isdigit(static_cast<UChar32>(c)); }

bool IsApostrophe(char32_t c) { return c == U'\'' || c == U'’'; }

bool IsWordChar(char32_t c) {
  return IsLetter(c) || IsDigit(c) || IsApostrophe(c);
}

bool IsSpace(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

bool IsUpper(char32_t c) { return u_isUUppercase(static_cast<UChar32>(c)); }

bool IsLower(char32_t c) { return u_isULowercase(static_cast<UChar32>(c)); }

char32_t ToLower(char32_t c) {
  return static_cast<char32_t>(u_tolower(static_cast<UChar32>(c)));
}

char32_t ToUpper(char32_t c) {
  return static_cast<char32_t>(u_toupper(static_cast<UChar32>(c)));
}

std::u32string ToLower(std::u32string_view s) {
  std::u32string out(s);
  for (char32_t& c : out) c = ToLower(c);
  return out;
}

std::u32string ToUpper(std::u32string_view s) {
  std::u32string out(s);
  for (char32_t& c : out) c = ToUpper(c);
  return out;
}

std::string ToLowerUtf8(std::string_view s) {
  return EncodeUtf8(ToLower(DecodeUtf8(s)));
}

std::vector<Token> Tokenize(std::u32string_view s) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!IsWordChar(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && IsWordChar(s[j])) ++j;
    tokens.push_back(Token{{i, j}, std::u32string(s.substr(i, j - i))});
    i = j;
  }
  return tokens;
}

std::vector<std::string> TokenizeUtf8(std::string_view s) {
  std::vector<std::string> out;
  for (const Token& t : Tokenize(DecodeUtf8(s))) out.push_back(EncodeUtf8(t.text));
  return out;
}

bool IsAlphabetic(std::u32string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), IsLetter);
}

std::vector<Interval> MergeIntervals(std::vector<Interval> intervals) {
  std::erase_if(intervals, [](const Interval& i) { return i.empty(); });
  std::sort(intervals.begin(), intervals.end());
  std::vector<Interval> merged;
  for (const Interval& i : intervals) {
    if (!merged.empty() && i.begin <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, i.end);
    } else {
      merged.push_back(i);
    }
  }
  return merged;
}

bool IntersectsAny(const Interval& candidate,
                   const std::vector<Interval>& sorted) {
  // First interval whose end lies beyond the candidate's begin.
  auto it = std::upper_bound(
      sorted.begin(), sorted.end(), candidate.begin,
      [](std::size_t pos, const Interval& i) { return pos < i.end; });
  return it != sorted.end() && it->intersects(candidate);
}

std::u32string Slice(std::u32string_view s, const Interval& span) {
  return std::u32string(s.substr(span.begin, span.size()));
}

}  // namespace advspan::text
