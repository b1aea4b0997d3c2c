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

#ifndef ADVSPAN_EVAL_H_
#define ADVSPAN_EVAL_H_

// Answer scoring, entropy-based confidence and three-model token voting.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "advspan/corpus.h"
#include "advspan/model_client.h"
#include "json.hpp"

namespace advspan::eval {

// Lowercase, strip ASCII punctuation, drop the articles a/an/the as whole
// words and collapse whitespace.
std::string NormalizeAnswer(std::string_view answer);

// 1 when the normalized prediction equals any normalized gold answer.
int ExactMatch(std::string_view prediction, const std::vector<std::string>& golds);
// Maximum token-multiset F1 over the gold answers. Two answers that both
// normalize to nothing score 1.
double F1Score(std::string_view prediction, const std::vector<std::string>& golds);

// -(sum p ln p) / ln n, with 0 ln 0 = 0 and H = 0 when n = 1. A distribution
// uniform over k entries yields ln k / ln n directly.
double NormalizedEntropy(std::span<const double> probs, std::size_t n);

struct ConfidenceInputs {
  std::vector<double> start;
  std::vector<double> end;
  std::size_t n = 1;
};

// 1 - (H_n(start) + H_n(end)) / 2, clamped to [0, 1].
double Confidence(const ConfidenceInputs& inputs);
// Confidence of the distribution (p, q, ..., q) with q = (1 - p) / (n - 1).
double ConfidenceFlat(std::size_t n, double p_start, double p_end);
double ResponseConfidence(const model_client::ModelResponse& response);

// Tokens that at least two of the three answers share, compared
// case-insensitively, in order of first appearance and space-joined.
std::string EnsembleAnswer(const std::array<std::string, 3>& answers);

enum class TrainingAmount { kNone, kHalf, kFull, kBoth, kEns };

std::string_view ToString(TrainingAmount amount);
TrainingAmount ParseTrainingAmount(std::string_view name);

struct EvalRecord {
  std::string qa_id;
  std::string model_answer;
  std::vector<std::string> gold_answers;
  int em = 0;
  double f1 = 0.0;
  double confidence = 0.0;
  bool is_error = true;
  std::optional<corpus::PerturbationMeta> perturbation;
  TrainingAmount training_amount = TrainingAmount::kNone;
  // Nonempty when the model query failed; such a record carries no score.
  std::string failure;

  bool failed() const { return !failure.empty(); }
  bool operator==(const EvalRecord&) const = default;
};

// Scores one answer against its golds.
EvalRecord ScoreAnswer(std::string qa_id, std::string model_answer,
                       std::vector<std::string> gold_answers, double confidence,
                       TrainingAmount amount);

// One record per QA in dataset order. Model failures are recorded per QA.
std::vector<EvalRecord> EvaluateDataset(const corpus::Dataset& dataset,
                                        model_client::Predictor& predictor,
                                        TrainingAmount amount,
                                        std::size_t max_in_flight = 8);

// Votes the none/half/full runs into an ens run. The three runs must list
// the same QA ids in the same order; otherwise JoinError. Ensemble confidence
// is the mean member confidence.
std::vector<EvalRecord> EnsembleRecords(
    const std::array<std::vector<EvalRecord>, 3>& runs);

nlohmann::json ToJson(const EvalRecord& record);
EvalRecord RecordFromJson(const nlohmann::json& j);

std::string RecordsToJsonl(std::span<const EvalRecord> records);
// Throws ParseError with the offending line number.
std::vector<EvalRecord> RecordsFromJsonl(std::string_view jsonl);

// Columns: qa_id, training_amount, perturbation_type, perturbation_amount,
// em, f1, confidence, is_error, model_answer, gold_answers, failure.
// gold_answers is a JSON array.
extern const std::array<std::string_view, 11> kCsvColumns;
std::string RecordsToCsv(std::span<const EvalRecord> records);

// Shortest round-trip decimal form.
std::string FormatDouble(double value);

}  // namespace advspan::eval

#endif  // ADVSPAN_EVAL_H_
