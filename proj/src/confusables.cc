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

#include "advspan/confusables.h"

#include <algorithm>
#include <charconv>
#include <string>

#include "advspan/error.h"

namespace advspan::confusables {

namespace {

std::string_view Trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// A field is one or more space-separated hex codepoints.
std::vector<char32_t> ParseField(std::string_view field, std::size_t line) {
  std::vector<char32_t> out;
  std::size_t i = 0;
  while (i < field.size()) {
    while (i < field.size() && (field[i] == ' ' || field[i] == '\t')) ++i;
    if (i == field.size()) break;
    std::size_t j = i;
    while (j < field.size() && field[j] != ' ' && field[j] != '\t') ++j;
    const std::string_view hex = field.substr(i, j - i);
    uint32_t value = 0;
    auto [end, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), value, 16);
    if (ec != std::errc() || end != hex.data() + hex.size() || value > 0x10FFFF) {
      throw ParseError("malformed codepoint \"" + std::string(hex) + "\"", line,
                       ParseError::Unit::kLine);
    }
    out.push_back(static_cast<char32_t>(value));
    i = j;
  }
  if (out.empty()) {
    throw ParseError("empty codepoint field", line, ParseError::Unit::kLine);
  }
  return out;
}

const std::vector<char32_t>& EmptyList() {
  static const std::vector<char32_t> empty;
  return empty;
}

}  // namespace

void ConfusableTable::AddPair(char32_t a, char32_t b) {
  if (a == b) return;
  auto add = [this](char32_t from, char32_t to) {
    std::vector<char32_t>& list = table_[from];
    if (std::find(list.begin(), list.end(), to) == list.end()) list.push_back(to);
  };
  add(a, b);
  add(b, a);
}

const std::vector<char32_t>& ConfusableTable::Alternatives(char32_t c) const {
  auto it = table_.find(c);
  return it == table_.end() ? EmptyList() : it->second;
}

ConfusableTable ParseConfusables(std::string_view bytes) {
  if (bytes.starts_with("\xEF\xBB\xBF")) bytes.remove_prefix(3);
  ConfusableTable table;
  std::size_t line_number = 0;
  while (!bytes.empty()) {
    ++line_number;
    const std::size_t newline = bytes.find('\n');
    std::string_view line = bytes.substr(0, newline);
    bytes.remove_prefix(newline == std::string_view::npos ? bytes.size()
                                                          : newline + 1);
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;

    std::vector<std::string_view> raw;
    for (std::size_t start = 0;;) {
      const std::size_t semi = line.find(';', start);
      raw.push_back(Trim(line.substr(start, semi - start)));
      if (semi == std::string_view::npos) break;
      start = semi + 1;
    }
    if (raw.size() > 1 && raw.back().empty()) raw.pop_back();
    std::vector<std::vector<char32_t>> fields;
    for (std::string_view field : raw) {
      if (field.empty()) {
        throw ParseError("empty codepoint field", line_number,
                         ParseError::Unit::kLine);
      }
      fields.push_back(ParseField(field, line_number));
    }
    if (fields.size() < 2) {
      throw ParseError("expected at least two fields", line_number,
                       ParseError::Unit::kLine);
    }
    if (fields[0].size() != 1) continue;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (fields[i].size() == 1) table.AddPair(fields[0][0], fields[i][0]);
    }
  }
  return table;
}

std::vector<char32_t> Alternatives(const ConfusableTable& table, char32_t c) {
  return table.Alternatives(c);
}

std::vector<Homoglyph> DetectHomoglyphs(
    std::u32string_view text, const ConfusableTable& table,
    const std::set<char32_t>& reference_alphabet) {
  std::vector<Homoglyph> found;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char32_t c = text[i];
    if (reference_alphabet.count(c)) continue;
    const auto& alternatives = table.Alternatives(c);
    if (std::any_of(alternatives.begin(), alternatives.end(),
                    [&](char32_t a) { return reference_alphabet.count(a) != 0; })) {
      found.push_back({i, c});
    }
  }
  return found;
}

std::set<char32_t> AsciiAlphabet() {
  std::set<char32_t> alphabet;
  for (char32_t c = 0x20; c <= 0x7E; ++c) alphabet.insert(c);
  return alphabet;
}

}  // namespace advspan::confusables
