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

#ifndef ADVSPAN_CONFUSABLES_H_
#define ADVSPAN_CONFUSABLES_H_

// Deceptive single-codepoint substitutions read from the Unicode
// intentional-confusables data file (intentional.txt).

#include <cstddef>
#include <map>
#include <set>
#include <string_view>
#include <vector>

namespace advspan::confusables {

class ConfusableTable {
 public:
  ConfusableTable() = default;

  // Records a <-> b. Self pairs are ignored; repeated pairs are kept once.
  void AddPair(char32_t a, char32_t b);

  // Alternatives in file order; empty when `c` has none.
  const std::vector<char32_t>& Alternatives(char32_t c) const;
  bool HasAlternatives(char32_t c) const { return table_.count(c) != 0; }

  std::size_t size() const { return table_.size(); }
  bool empty() const { return table_.empty(); }
  const std::map<char32_t, std::vector<char32_t>>& entries() const {
    return table_;
  }

 private:
  std::map<char32_t, std::vector<char32_t>> table_;
};

// Parses intentional.txt. Data lines are "<hex> ; <hex> [; ...] # comment";
// the first field is the source and each later field pairs with it. Fields
// holding a multi-codepoint sequence are skipped. Throws ParseError with the
// line number on a malformed hex field.
ConfusableTable ParseConfusables(std::string_view bytes);

std::vector<char32_t> Alternatives(const ConfusableTable& table, char32_t c);

struct Homoglyph {
  std::size_t position = 0;
  char32_t codepoint = 0;

  bool operator==(const Homoglyph&) const = default;
};

// Positions of codepoints outside `reference_alphabet` that are confusable
// with some codepoint inside it.
std::vector<Homoglyph> DetectHomoglyphs(std::u32string_view text,
                                        const ConfusableTable& table,
                                        const std::set<char32_t>& reference_alphabet);

// Printable ASCII, U+0020..U+007E.
std::set<char32_t> AsciiAlphabet();

}  // namespace advspan::confusables

#endif  // ADVSPAN_CONFUSABLES_H_
