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

#ifndef ADVSPAN_FEATURES_H_
#define ADVSPAN_FEATURES_H_

// Explanatory features of evaluation records and their one-hot encoding.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "advspan/corpus.h"
#include "advspan/eval.h"
#include "json.hpp"

namespace advspan::analysis {

enum class QuestionType { kWho, kWhat, kWhich, kWhen, kWhere, kWhy, kHow, kOther };

inline constexpr std::array<QuestionType, 8> kQuestionTypes = {
    QuestionType::kWho,   QuestionType::kWhat, QuestionType::kWhich,
    QuestionType::kWhen,  QuestionType::kWhere, QuestionType::kWhy,
    QuestionType::kHow,   QuestionType::kOther};

std::string_view ToString(QuestionType type);
QuestionType ParseQuestionType(std::string_view name);

// Lowercased first token of the question; unknown words and empty questions
// map to kOther.
QuestionType QuestionTypeOf(std::string_view question);

// Vowel groups over "aeiouy" in the lowercased word, minus one for a final
// 'e', never below 1.
std::size_t CountSyllables(std::u32string_view word);

// Flesch-Kincaid grade level. Throws UndefinedInputError without words.
double FleschKincaid(std::string_view text);

// Share of golds equal to the most frequent normalized gold answer.
double HumanAgreement(const std::vector<std::string>& golds);

std::size_t TokenCount(std::string_view text);

struct FeatureVector {
  std::string qa_id;
  eval::TrainingAmount training_amount = eval::TrainingAmount::kNone;
  corpus::PerturbationType perturbation_type = corpus::PerturbationType::kChar;
  QuestionType question_type = QuestionType::kOther;
  std::size_t question_length = 0;
  std::size_t context_length = 0;
  std::size_t answer_length = 0;
  double readability = 0.0;
  double human_agreement = 1.0;
  double confidence = 0.0;
  int label = 0;

  bool operator==(const FeatureVector&) const = default;
};

// Per-QA context statistics shared by feature extraction and reports.
struct QaContext {
  std::string question;
  std::size_t question_length = 0;
  std::size_t context_length = 0;
  double readability = 0.0;
};

// qa_id -> statistics of its (possibly perturbed) paragraph.
std::unordered_map<std::string, QaContext> IndexContexts(const corpus::Dataset& dataset);

// One vector per scored record. Failed records are skipped. Records whose
// amount is ens, or that carry no perturbation, raise ValidationError; ids
// missing from the dataset raise JoinError.
std::vector<FeatureVector> BuildFeatures(std::span<const eval::EvalRecord> records,
                                         const corpus::Dataset& dataset);

struct FeatureOptions {
  bool include_human_agreement = false;
  bool include_confidence = false;
};

struct EncodedMatrix {
  std::vector<std::string> columns;
  // Source feature of each column; one-hot columns share their group.
  std::vector<std::string> groups;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
};

EncodedMatrix Encode(std::span<const FeatureVector> features,
                     const FeatureOptions& options = {});

nlohmann::json ToJson(const FeatureVector& f);
FeatureVector FeatureFromJson(const nlohmann::json& j);
std::string FeaturesToJsonl(std::span<const FeatureVector> features);
std::vector<FeatureVector> FeaturesFromJsonl(std::string_view jsonl);
std::string FeaturesToCsv(std::span<const FeatureVector> features);

}  // namespace advspan::analysis

#endif  // ADVSPAN_FEATURES_H_
