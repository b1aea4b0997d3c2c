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

#ifndef ADVSPAN_ATTACK_H_
#define ADVSPAN_ATTACK_H_

// Leave-one-out word importance against a black-box model and export of
// negative constraints for a sentence rewriter.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "advspan/corpus.h"
#include "advspan/model_client.h"
#include "advspan/perturb.h"
#include "advspan/text.h"
#include "json.hpp"

namespace advspan::attack {

struct ImportanceScore {
  std::string token;
  text::Interval position;
  // c_base - c_ablated, where c is the confidence when the answer is an
  // exact match and minus the confidence otherwise.
  double score = 0.0;
  bool base_correct = false;
  bool ablated_correct = false;

  bool operator==(const ImportanceScore&) const = default;
};

struct TokenFailure {
  std::string token;
  text::Interval position;
  std::string error;
};

struct ImportanceResult {
  std::size_t paragraph_index = 0;
  std::string qa_id;
  bool base_correct = false;
  double base_confidence = 0.0;
  // Ordered by token position.
  std::vector<ImportanceScore> scores;
  std::vector<TokenFailure> failures;
  std::size_t queries = 0;
};

// Deletes `span` and joins the remainder with a single space when both sides
// are nonempty.
std::string DeleteSpan(std::u32string_view context, const text::Interval& span);

// Tokens that do not touch any gold answer of the paragraph.
std::vector<text::Token> EligibleTokens(const corpus::Paragraph& paragraph);

// Queries the base context once and each eligible-token deletion once. A
// failed base query throws; failed ablations are recorded and skipped.
ImportanceResult ImportanceScores(const corpus::Paragraph& paragraph,
                                  const corpus::QA& qa,
                                  model_client::Predictor& predictor,
                                  std::size_t max_in_flight = 8);

// Per-position maximum over several QAs' results for the same paragraph.
std::vector<ImportanceScore> MaxAggregate(std::span<const ImportanceResult> results);

struct SentenceConstraints {
  std::size_t sentence_index = 0;
  std::vector<std::string> negative_constraints;

  bool operator==(const SentenceConstraints&) const = default;
};

struct ConstraintSpec {
  std::size_t paragraph_index = 0;
  // Only sentences that received at least one constraint, in order.
  std::vector<SentenceConstraints> sentences;

  bool operator==(const ConstraintSpec&) const = default;
};

inline constexpr std::size_t kDefaultConstraintCount = 5;

// The k highest-scoring distinct tokens (case-insensitive, ties broken by
// earlier position). Each is attached to every sentence of `context` that
// contains it.
ConstraintSpec TopKConstraints(std::span<const ImportanceScore> scores,
                               std::string_view context, std::size_t k,
                               std::size_t paragraph_index);

// {"paragraph_index", "sentence_index", "negative_constraints"} per line.
std::string ConstraintsToJsonl(std::span<const ConstraintSpec> specs);
nlohmann::json ToJson(const ImportanceResult& result);
std::string ImportanceToJsonl(std::span<const ImportanceResult> results);
std::vector<ImportanceResult> ImportanceFromJsonl(std::string_view jsonl);

// Applies rewritten sentences paragraph by paragraph and remaps answers.
// Paragraphs without a paraphrase set are left untouched.
corpus::Dataset ApplyStrategicParaphrases(const corpus::Dataset& dataset,
                                          const perturb::ParaphraseSets& sets);

}  // namespace advspan::attack

#endif  // ADVSPAN_ATTACK_H_
