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

#ifndef ADVSPAN_CORPUS_H_
#define ADVSPAN_CORPUS_H_

// SQuAD v1.1 format datasets with codepoint-indexed answer offsets.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "advspan/offset_map.h"
#include "advspan/text.h"
#include "json.hpp"

namespace advspan::corpus {

enum class PerturbationType { kNone, kChar, kWord, kPara };
enum class Amount { kNone, kHalf, kFull, kBoth };

std::string_view ToString(PerturbationType type);
std::string_view ToString(Amount amount);
// Throw ConfigError on unknown names.
PerturbationType ParsePerturbationType(std::string_view name);
Amount ParseAmount(std::string_view name);

struct PerturbationMeta {
  PerturbationType type = PerturbationType::kNone;
  Amount amount = Amount::kNone;

  bool operator==(const PerturbationMeta&) const = default;
};

struct AnswerSpan {
  std::string text;
  // Codepoint offset into the paragraph context.
  std::size_t answer_start = 0;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const AnswerSpan&) const = default;
};

struct QA {
  std::string id;
  std::string question;
  std::vector<AnswerSpan> answers;
  // Present exactly when this QA's context was perturbed.
  std::optional<PerturbationMeta> perturbation;
  nlohmann::json extra = nlohmann::json::object();

  bool is_perturbed() const { return perturbation.has_value(); }
  bool operator==(const QA&) const = default;
};

struct Paragraph {
  std::string context;
  std::vector<QA> qas;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const Paragraph&) const = default;
};

struct Article {
  std::string title;
  std::vector<Paragraph> paragraphs;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const Article&) const = default;
};

struct Dataset {
  std::string version = "1.1";
  std::vector<Article> articles;
  nlohmann::json extra = nlohmann::json::object();

  std::size_t paragraph_count() const;
  std::size_t qa_count() const;

  bool operator==(const Dataset&) const = default;
};

struct ParseStats {
  // Answers whose text does not occur anywhere in their context.
  std::size_t dropped_answers = 0;
  // QAs left without any answer after dropping.
  std::size_t dropped_qas = 0;
  std::size_t dropped_paragraphs = 0;
};

// Parses and validates a SQuAD-format file. Answers whose text cannot be found
// anywhere in the context are dropped and counted in `stats`; answers whose
// text occurs in the context but not at `answer_start` raise ValidationError
// naming the QA id. Malformed JSON raises ParseError with the byte offset.
Dataset ParseDataset(std::string_view bytes, ParseStats* stats = nullptr);

// Pretty-printed SQuAD JSON. Unknown fields are written back verbatim;
// perturbation metadata lives under "x_perturbation".
std::string SerializeDataset(const Dataset& dataset);
nlohmann::json ToJson(const Dataset& dataset);

// Throws ValidationError on the first broken invariant.
void ValidateDataset(const Dataset& dataset);

// Union of all gold-answer spans of a paragraph, merged and sorted.
std::vector<text::Interval> AnswerRegions(const Paragraph& paragraph);

// Moves every answer through `map`. Throws SpanProtectionError naming the QA
// when an answer overlaps a rewritten region.
std::vector<QA> RemapAnswers(const std::vector<QA>& qas, const OffsetMap& map);

// Visits paragraphs in document order with their global index.
template <typename Fn>
void ForEachParagraph(const Dataset& dataset, Fn&& fn) {
  std::size_t index = 0;
  for (const Article& article : dataset.articles) {
    for (const Paragraph& paragraph : article.paragraphs) fn(index++, paragraph);
  }
}

}  // namespace advspan::corpus

#endif  // ADVSPAN_CORPUS_H_
