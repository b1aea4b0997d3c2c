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

#include "advspan/perturb.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "advspan/error.h"
#include "advspan/rng.h"
#include "json.hpp"

namespace advspan::perturb {

using corpus::Amount;
using corpus::PerturbationType;
using nlohmann::json;
using text::Interval;

namespace {

constexpr uint64_t kCharStream = 1;
constexpr uint64_t kWordStream = 2;
constexpr uint64_t kHalfStream = 3;

void CheckRate(double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw ConfigError("perturbation rate must lie in [0, 1]");
  }
}

bool IsTerminator(char32_t c) { return c == U'.' || c == U'!' || c == U'?'; }

bool IsCloser(char32_t c) {
  return c == U'"' || c == U'\'' || c == U')' || c == U']' || c == U'”' ||
         c == U'’' || c == U'»';
}

bool IsOpener(char32_t c) {
  return c == U'"' || c == U'\'' || c == U'(' || c == U'[' || c == U'“' ||
         c == U'‘' || c == U'«';
}

bool StartsSentence(char32_t c) { return text::IsUpper(c) || text::IsDigit(c); }

// Is the '.' at `dot` the end of a listed abbreviation?
bool EndsAbbreviation(std::u32string_view s, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0 && !text::IsSpace(s[begin - 1])) --begin;
  while (begin < dot && IsOpener(s[begin])) ++begin;
  const std::u32string_view word = s.substr(begin, dot - begin + 1);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) !=
         kAbbreviations.end();
}

// Splices `edits` (sorted, non-overlapping) into `source`.
std::u32string Splice(std::u32string_view source,
                      const std::vector<std::pair<Interval, std::u32string>>& edits) {
  std::u32string out;
  out.reserve(source.size());
  std::size_t pos = 0;
  for (const auto& [span, replacement] : edits) {
    out.append(source.substr(pos, span.begin - pos));
    out.append(replacement);
    pos = span.end;
  }
  out.append(source.substr(pos));
  return out;
}

Rewrite Finish(std::u32string_view source,
               std::vector<std::pair<Interval, std::u32string>> edits) {
  std::sort(edits.begin(), edits.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<corpus::Edit> map_edits;
  map_edits.reserve(edits.size());
  for (const auto& [span, replacement] : edits) {
    map_edits.push_back({span, replacement.size()});
  }
  return Rewrite{text::EncodeUtf8(Splice(source, edits)),
                 corpus::OffsetMap::FromEdits(source.size(), std::move(map_edits))};
}

}  // namespace

const std::vector<std::u32string_view> kAbbreviations = {
    U"Mr.",   U"Mrs.",  U"Ms.",   U"Dr.",   U"Prof.", U"Sr.",   U"Jr.",
    U"St.",   U"Mt.",   U"No.",   U"Nos.",  U"Vol.",  U"vs.",   U"e.g.",
    U"i.e.",  U"cf.",   U"al.",   U"Gen.",  U"Col.",  U"Lt.",   U"Sgt.",
    U"Capt.", U"Rev.",  U"Hon.",  U"Gov.",  U"Sen.",  U"Rep.",  U"Inc.",
    U"Ltd.",  U"Co.",   U"Corp.", U"Bros.", U"U.S.",  U"U.K.",  U"U.N.",
    U"U.S.A.", U"E.U.", U"Jan.",  U"Feb.",  U"Mar.",  U"Apr.",  U"Jun.",
    U"Jul.",  U"Aug.",  U"Sep.",  U"Sept.", U"Oct.",  U"Nov.",  U"Dec.",
    U"approx.", U"ca.", U"Fig.",  U"Eq.",   U"Ph.D.",
};

std::size_t PerturbationCount(double rate, std::size_t eligible) {
  const double exact = rate * static_cast<double>(eligible);
  const double nearest = std::round(exact);
  const double count =
      std::fabs(exact - nearest) < 1e-9 ? nearest : std::ceil(exact);
  return std::min(static_cast<std::size_t>(std::max(count, 0.0)), eligible);
}

Rewrite PerturbChars(std::string_view context, const ProtectedRegions& prot,
                     const confusables::ConfusableTable& table, double rate,
                     uint64_t seed) {
  CheckRate(rate);
  const std::u32string source = text::DecodeUtf8(context);
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (table.HasAlternatives(source[i]) && !prot.Intersects({i, i + 1})) {
      eligible.push_back(i);
    }
  }
  Rng rng(seed, kCharStream);
  std::vector<std::pair<Interval, std::u32string>> edits;
  for (std::size_t pick :
       rng.Sample(eligible.size(), PerturbationCount(rate, eligible.size()))) {
    const std::size_t pos = eligible[pick];
    const auto& alternatives = table.Alternatives(source[pos]);
    const char32_t replacement = alternatives[rng.Below(alternatives.size())];
    edits.push_back({{pos, pos + 1}, std::u32string(1, replacement)});
  }
  return Finish(source, std::move(edits));
}

std::u32string MatchCase(std::u32string_view original,
                         std::u32string_view replacement) {
  bool any_upper = false;
  bool any_lower = false;
  bool first_upper = false;
  bool seen_cased = false;
  for (char32_t c : original) {
    const bool upper = text::IsUpper(c);
    const bool lower = text::IsLower(c);
    if (!seen_cased && (upper || lower)) {
      first_upper = upper;
      seen_cased = true;
    } else if (upper) {
      any_upper = true;
    }
    any_lower = any_lower || lower;
  }
  if (!seen_cased || (!first_upper && !any_upper)) return text::ToLower(replacement);
  if (first_upper && !any_upper) {
    std::u32string out = text::ToLower(replacement);
    if (!out.empty()) out[0] = text::ToUpper(out[0]);
    return out;
  }
  if (first_upper && !any_lower) return text::ToUpper(replacement);
  return std::u32string(replacement);
}

Rewrite PerturbWords(std::string_view context, const ProtectedRegions& prot,
                     const embeddings::EmbeddingStore& store, double rate,
                     uint64_t seed, embeddings::NeighborCache* cache) {
  CheckRate(rate);
  const std::u32string source = text::DecodeUtf8(context);
  struct Candidate {
    Interval span;
    std::u32string replacement;
  };
  std::vector<Candidate> eligible;
  for (const text::Token& token : text::Tokenize(source)) {
    if (!text::IsAlphabetic(token.text) || prot.Intersects(token.span)) continue;
    const std::string key = text::EncodeUtf8(text::ToLower(token.text));
    std::vector<embeddings::Neighbor> neighbors;
    if (cache != nullptr) {
      neighbors = cache->Get(key);
    } else if (store.Contains(key)) {
      neighbors = store.NearestNeighbors(key, 4);
    }
    for (const embeddings::Neighbor& n : neighbors) {
      std::u32string replacement = MatchCase(token.text, text::DecodeUtf8(n.word));
      if (replacement != token.text) {
        eligible.push_back({token.span, std::move(replacement)});
        break;
      }
    }
  }
  Rng rng(seed, kWordStream);
  std::vector<std::pair<Interval, std::u32string>> edits;
  for (std::size_t pick :
       rng.Sample(eligible.size(), PerturbationCount(rate, eligible.size()))) {
    edits.push_back({eligible[pick].span, eligible[pick].replacement});
  }
  return Finish(source, std::move(edits));
}

std::vector<Interval> SplitSentences(std::u32string_view s) {
  std::vector<Interval> sentences;
  const std::size_t n = s.size();
  std::size_t i = 0;
  while (i < n) {
    while (i < n && text::IsSpace(s[i])) ++i;
    if (i == n) break;
    const std::size_t start = i;
    std::size_t end = n;
    std::size_t j = start;
    while (j < n) {
      if (!IsTerminator(s[j])) {
        ++j;
        continue;
      }
      const std::size_t last_terminator = j;
      std::size_t k = j + 1;
      while (k < n && (IsTerminator(s[k]) || IsCloser(s[k]))) ++k;
      if (k == n) break;
      if (!text::IsSpace(s[k])) {
        j = k;
        continue;
      }
      std::size_t m = k;
      while (m < n && text::IsSpace(s[m])) ++m;
      const bool next_starts =
          m < n && (StartsSentence(s[m]) ||
                    (IsOpener(s[m]) && m + 1 < n && StartsSentence(s[m + 1])));
      const bool abbreviation =
          s[last_terminator] == U'.' && k == last_terminator + 1 &&
          EndsAbbreviation(s, last_terminator);
      if (next_starts && !abbreviation) {
        end = k;
        break;
      }
      j = k;
    }
    std::size_t trimmed = end;
    while (trimmed > start && text::IsSpace(s[trimmed - 1])) --trimmed;
    sentences.push_back({start, trimmed});
    i = end;
  }
  return sentences;
}

std::vector<Interval> SplitSentences(std::string_view context) {
  return SplitSentences(std::u32string_view(text::DecodeUtf8(context)));
}

Rewrite ApplyParaphrases(std::string_view context, const ProtectedRegions& prot,
                         const ParaphraseSet& paraphrases) {
  const std::u32string source = text::DecodeUtf8(context);
  const std::vector<Interval> sentences = SplitSentences(std::u32string_view(source));
  std::vector<std::pair<Interval, std::u32string>> edits;
  for (const auto& [index, replacement] : paraphrases.sentences) {
    if (index >= sentences.size()) {
      throw ValidationError("paraphrase for sentence " + std::to_string(index) +
                            " but the context has " +
                            std::to_string(sentences.size()) + " sentences");
    }
    if (prot.Intersects(sentences[index])) {
      throw SpanProtectionError("paraphrase targets answer-bearing sentence " +
                                std::to_string(index));
    }
    edits.push_back({sentences[index], text::DecodeUtf8(replacement)});
  }
  return Finish(source, std::move(edits));
}

ParaphraseSets ParseParaphraseSets(std::string_view jsonl) {
  ParaphraseSets sets;
  std::size_t line_number = 0;
  while (!jsonl.empty()) {
    ++line_number;
    const std::size_t newline = jsonl.find('\n');
    std::string_view line = jsonl.substr(0, newline);
    jsonl.remove_prefix(newline == std::string_view::npos ? jsonl.size()
                                                          : newline + 1);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error&) {
      throw ParseError("malformed paraphrase record", line_number,
                       ParseError::Unit::kLine);
    }
    const auto index = record.find("paragraph_index");
    const auto sentences = record.find("sentences");
    if (!record.is_object() || index == record.end() ||
        !index->is_number_unsigned() || sentences == record.end() ||
        !sentences->is_object()) {
      throw ParseError("paraphrase record needs paragraph_index and sentences",
                       line_number, ParseError::Unit::kLine);
    }
    ParaphraseSet set;
    for (auto it = sentences->begin(); it != sentences->end(); ++it) {
      std::size_t sentence = 0;
      const std::string& key = it.key();
      auto [end, ec] = std::from_chars(key.data(), key.data() + key.size(), sentence);
      if (ec != std::errc() || end != key.data() + key.size() || !it->is_string()) {
        throw ParseError("bad sentence entry \"" + key + "\"", line_number,
                         ParseError::Unit::kLine);
      }
      set.sentences[sentence] = it->get<std::string>();
    }
    if (!sets.emplace(index->get<std::size_t>(), std::move(set)).second) {
      throw ParseError("duplicate paragraph_index", line_number,
                       ParseError::Unit::kLine);
    }
  }
  return sets;
}

std::string SerializeParaphraseSets(const ParaphraseSets& sets) {
  std::string out;
  for (const auto& [index, set] : sets) {
    json sentences = json::object();
    for (const auto& [sentence, replacement] : set.sentences) {
      sentences[std::to_string(sentence)] = replacement;
    }
    out += json{{"paragraph_index", index}, {"sentences", sentences}}.dump() + "\n";
  }
  return out;
}

uint64_t ParagraphSeed(uint64_t seed, std::size_t paragraph_index) {
  return SplitMix64(SplitMix64(seed) ^
                    SplitMix64(static_cast<uint64_t>(paragraph_index) +
                               0x632BE59BD9B4E019ull));
}

corpus::Paragraph PerturbParagraph(const corpus::Paragraph& paragraph,
                                   std::size_t paragraph_index,
                                   const PerturbationSpec& spec,
                                   const Resources& resources,
                                   embeddings::NeighborCache* cache) {
  const ProtectedRegions prot = ProtectedRegions::ForParagraph(paragraph);
  const uint64_t seed = ParagraphSeed(spec.seed, paragraph_index);
  Rewrite rewrite;
  switch (spec.type) {
    case PerturbationType::kNone:
      return paragraph;
    case PerturbationType::kChar:
      if (!resources.confusables) throw ConfigError("char perturbation needs a confusables table");
      rewrite = PerturbChars(paragraph.context, prot, *resources.confusables,
                             spec.rate, seed);
      break;
    case PerturbationType::kWord:
      if (!resources.embeddings) throw ConfigError("word perturbation needs embeddings");
      rewrite = PerturbWords(paragraph.context, prot, *resources.embeddings,
                             spec.rate, seed, cache);
      break;
    case PerturbationType::kPara: {
      if (!resources.paraphrases) throw ConfigError("para perturbation needs paraphrases");
      auto it = resources.paraphrases->find(paragraph_index);
      rewrite = ApplyParaphrases(
          paragraph.context, prot,
          it == resources.paraphrases->end() ? ParaphraseSet{} : it->second);
      break;
    }
  }
  corpus::Paragraph out = paragraph;
  out.qas = corpus::RemapAnswers(paragraph.qas, rewrite.map);
  out.context = std::move(rewrite.text);
  return out;
}

corpus::Dataset MakeVariant(const corpus::Dataset& dataset,
                            const PerturbationSpec& spec,
                            const Resources& resources) {
  CheckRate(spec.rate);
  if (spec.amount == Amount::kNone) return dataset;
  switch (spec.type) {
    case PerturbationType::kNone:
      throw ConfigError("perturbation type none cannot be combined with an amount");
    case PerturbationType::kChar:
      if (!resources.confusables) throw ConfigError("char perturbation needs a confusables table");
      break;
    case PerturbationType::kWord:
      if (!resources.embeddings) throw ConfigError("word perturbation needs embeddings");
      break;
    case PerturbationType::kPara:
      if (!resources.paraphrases) throw ConfigError("para perturbation needs paraphrases");
      break;
  }

  std::optional<embeddings::NeighborCache> cache;
  if (resources.embeddings) cache.emplace(*resources.embeddings);
  embeddings::NeighborCache* cache_ptr = cache ? &*cache : nullptr;

  const corpus::PerturbationMeta meta{spec.type, spec.amount};
  auto perturbed = [&](const corpus::Paragraph& p, std::size_t index) {
    corpus::Paragraph out = PerturbParagraph(p, index, spec, resources, cache_ptr);
    for (corpus::QA& qa : out.qas) qa.perturbation = meta;
    return out;
  };

  std::set<std::size_t> selected;
  const std::size_t n = dataset.paragraph_count();
  if (spec.amount == Amount::kHalf) {
    Rng rng(spec.seed, kHalfStream);
    for (std::size_t i : rng.Sample(n, n / 2)) selected.insert(i);
  }

  corpus::Dataset out = dataset;
  std::size_t index = 0;
  for (corpus::Article& article : out.articles) {
    for (corpus::Paragraph& paragraph : article.paragraphs) {
      if (spec.amount != Amount::kHalf || selected.count(index)) {
        paragraph = perturbed(paragraph, index);
      }
      ++index;
    }
  }
  if (spec.amount != Amount::kBoth) return out;

  for (corpus::Article& article : out.articles) {
    for (corpus::Paragraph& paragraph : article.paragraphs) {
      for (corpus::QA& qa : paragraph.qas) qa.id += "-p";
    }
  }
  corpus::Dataset both = dataset;
  for (corpus::Article& article : out.articles) both.articles.push_back(std::move(article));
  return both;
}

}  // namespace advspan::perturb
