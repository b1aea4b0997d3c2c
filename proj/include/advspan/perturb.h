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

#ifndef ADVSPAN_PERTURB_H_
#define ADVSPAN_PERTURB_H_

// Character, word and sentence level context perturbations that never touch
// gold answer spans, and the none/half/full/both dataset variants built from
// them.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "advspan/confusables.h"
#include "advspan/corpus.h"
#include "advspan/embeddings.h"
#include "advspan/offset_map.h"
#include "advspan/text.h"

namespace advspan::perturb {

inline constexpr double kDefaultRate = 0.25;

struct PerturbationSpec {
  corpus::PerturbationType type = corpus::PerturbationType::kChar;
  double rate = kDefaultRate;
  uint64_t seed = 0;
  corpus::Amount amount = corpus::Amount::kFull;
};

// Sorted, merged codepoint intervals that must not change.
class ProtectedRegions {
 public:
  ProtectedRegions() = default;
  explicit ProtectedRegions(std::vector<text::Interval> intervals)
      : intervals_(text::MergeIntervals(std::move(intervals))) {}

  static ProtectedRegions ForParagraph(const corpus::Paragraph& paragraph) {
    ProtectedRegions regions;
    regions.intervals_ = corpus::AnswerRegions(paragraph);
    return regions;
  }

  bool Intersects(const text::Interval& span) const {
    return text::IntersectsAny(span, intervals_);
  }
  const std::vector<text::Interval>& intervals() const { return intervals_; }

 private:
  std::vector<text::Interval> intervals_;
};

// Sentence index -> replacement text for one paragraph.
struct ParaphraseSet {
  std::map<std::size_t, std::string> sentences;

  bool operator==(const ParaphraseSet&) const = default;
};

// paragraph_index -> paraphrases, read from JSON Lines records of the form
// {"paragraph_index": int, "sentences": {"<idx>": "<replacement>"}}.
using ParaphraseSets = std::map<std::size_t, ParaphraseSet>;
ParaphraseSets ParseParaphraseSets(std::string_view jsonl);
std::string SerializeParaphraseSets(const ParaphraseSets& sets);

struct Rewrite {
  std::string text;
  corpus::OffsetMap map;
};

// Number of positions to perturb: min(ceil(rate * eligible), eligible).
// Products within 1e-9 of an integer are treated as that integer.
std::size_t PerturbationCount(double rate, std::size_t eligible);

// Homograph attack: replaces PerturbationCount(rate, |E|) codepoints, where E
// is the set of unprotected positions with at least one alternative, each by
// a uniformly chosen alternative. Codepoint length is preserved.
Rewrite PerturbChars(std::string_view context, const ProtectedRegions& prot,
                     const confusables::ConfusableTable& table, double rate,
                     uint64_t seed);

// Replaces PerturbationCount(rate, |eligible|) alphabetic, unprotected,
// in-vocabulary tokens (lookup is lowercased) by their nearest neighbor,
// re-applying the token's casing pattern. `cache` is optional.
Rewrite PerturbWords(std::string_view context, const ProtectedRegions& prot,
                     const embeddings::EmbeddingStore& store, double rate,
                     uint64_t seed, embeddings::NeighborCache* cache = nullptr);

// Substitutes sentences by index, keeping the original inter-sentence
// whitespace. Throws SpanProtectionError if a replaced sentence intersects
// `prot`, ValidationError for an out-of-range index.
Rewrite ApplyParaphrases(std::string_view context, const ProtectedRegions& prot,
                         const ParaphraseSet& paraphrases);

// Sentence boundaries: a sentence ends after '.', '!' or '?' (plus any
// closing quotes or brackets) when followed by whitespace and then an
// uppercase letter, a digit, or an opening quote/bracket before one. A '.'
// that ends a known abbreviation (see kAbbreviations) never ends a sentence.
// Intervals are trimmed of whitespace and cover all non-whitespace text.
std::vector<text::Interval> SplitSentences(std::u32string_view context);
std::vector<text::Interval> SplitSentences(std::string_view context);

extern const std::vector<std::u32string_view> kAbbreviations;

// Re-applies the casing pattern of `original` (lower, Capitalized, UPPER) to
// `replacement`. Mixed-case originals leave `replacement` as is.
std::u32string MatchCase(std::u32string_view original,
                         std::u32string_view replacement);

struct Resources {
  const confusables::ConfusableTable* confusables = nullptr;
  const embeddings::EmbeddingStore* embeddings = nullptr;
  const ParaphraseSets* paraphrases = nullptr;
};

// Seed of the generator used for one paragraph of a variant.
uint64_t ParagraphSeed(uint64_t seed, std::size_t paragraph_index);

// Perturbs one paragraph's context and remaps its answers.
corpus::Paragraph PerturbParagraph(const corpus::Paragraph& paragraph,
                                   std::size_t paragraph_index,
                                   const PerturbationSpec& spec,
                                   const Resources& resources,
                                   embeddings::NeighborCache* cache = nullptr);

// none: copy. full: every paragraph perturbed. half: floor(n/2) paragraphs
// chosen with the seeded generator are perturbed. both: clean articles
// followed by fully perturbed copies whose QA ids carry a "-p" suffix.
// Perturbed QAs carry {type, amount} metadata. Throws ConfigError when a
// resource needed by spec.type is missing.
corpus::Dataset MakeVariant(const corpus::Dataset& dataset,
                            const PerturbationSpec& spec,
                            const Resources& resources);

}  // namespace advspan::perturb

#endif  // ADVSPAN_PERTURB_H_
