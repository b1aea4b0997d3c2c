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

#include "advspan/eval.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "advspan/error.h"
#include "advspan/io.h"
#include "advspan/text.h"

namespace advspan::eval {

using nlohmann::json;

namespace {

constexpr std::u32string_view kAsciiPunctuation =
    U"!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

bool IsWordRunChar(char32_t c) {
  return text::IsLetter(c) || text::IsDigit(c) || c == U'_';
}

std::vector<std::string> NormalizedTokens(std::string_view answer) {
  std::vector<std::string> tokens;
  std::istringstream in(NormalizeAnswer(answer));
  for (std::string token; in >> token;) tokens.push_back(token);
  return tokens;
}

double TokenF1(const std::vector<std::string>& prediction,
               const std::vector<std::string>& gold) {
  if (prediction.empty() || gold.empty()) {
    return prediction.empty() && gold.empty() ? 1.0 : 0.0;
  }
  std::map<std::string, int> counts;
  for (const std::string& t : gold) ++counts[t];
  int common = 0;
  for (const std::string& t : prediction) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(prediction.size());
  const double recall = static_cast<double>(common) / static_cast<double>(gold.size());
  return 2.0 * precision * recall / (precision + recall);
}

double Clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double FlatEntropy(std::size_t n, double p) {
  if (n <= 1) return 0.0;
  p = Clamp01(p);
  const double q = (1.0 - p) / static_cast<double>(n - 1);
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (q > 0.0) h -= static_cast<double>(n - 1) * q * std::log(q);
  return h / std::log(static_cast<double>(n));
}

std::string MetaType(const std::optional<corpus::PerturbationMeta>& meta) {
  return std::string(corpus::ToString(meta ? meta->type : corpus::PerturbationType::kNone));
}

std::string MetaAmount(const std::optional<corpus::PerturbationMeta>& meta) {
  return std::string(corpus::ToString(meta ? meta->amount : corpus::Amount::kNone));
}

}  // namespace

std::string NormalizeAnswer(std::string_view answer) {
  std::u32string lowered = text::ToLower(text::DecodeUtf8(answer));
  std::u32string stripped;
  stripped.reserve(lowered.size());
  for (char32_t c : lowered) {
    if (kAsciiPunctuation.find(c) == std::u32string_view::npos) stripped += c;
  }

  std::u32string without_articles;
  for (std::size_t i = 0; i < stripped.size();) {
    if (!IsWordRunChar(stripped[i])) {
      without_articles += stripped[i++];
      continue;
    }
    std::size_t j = i;
    while (j < stripped.size() && IsWordRunChar(stripped[j])) ++j;
    const std::u32string_view run(stripped.data() + i, j - i);
    if (run == U"a" || run == U"an" || run == U"the") {
      without_articles += U' ';
    } else {
      without_articles += run;
    }
    i = j;
  }

  std::u32string collapsed;
  for (std::size_t i = 0; i < without_articles.size();) {
    if (text::IsSpace(without_articles[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < without_articles.size() && !text::IsSpace(without_articles[j])) ++j;
    if (!collapsed.empty()) collapsed += U' ';
    collapsed.append(without_articles, i, j - i);
    i = j;
  }
  return text::EncodeUtf8(collapsed);
}

int ExactMatch(std::string_view prediction, const std::vector<std::string>& golds) {
  const std::string normalized = NormalizeAnswer(prediction);
  for (const std::string& gold : golds) {
    if (NormalizeAnswer(gold) == normalized) return 1;
  }
  return 0;
}

double F1Score(std::string_view prediction, const std::vector<std::string>& golds) {
  const std::vector<std::string> predicted = NormalizedTokens(prediction);
  double best = 0.0;
  for (const std::string& gold : golds) {
    best = std::max(best, TokenF1(predicted, NormalizedTokens(gold)));
  }
  return best;
}

double NormalizedEntropy(std::span<const double> probs, std::size_t n) {
  if (n <= 1) return 0.0;
  const double log_n = std::log(static_cast<double>(n));
  // Uniform over its support: ln k / ln n, free of summation rounding.
  std::size_t support = 0;
  double level = 0.0;
  bool flat = true;
  for (double p : probs) {
    if (p <= 0.0) continue;
    if (support++ == 0) {
      level = p;
    } else if (p != level) {
      flat = false;
    }
  }
  if (flat && support > 1) return std::log(static_cast<double>(support)) / log_n;
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h / log_n;
}

double Confidence(const ConfidenceInputs& inputs) {
  const double hs = NormalizedEntropy(inputs.start, inputs.n);
  const double he = NormalizedEntropy(inputs.end, inputs.n);
  return Clamp01(1.0 - (hs + he) / 2.0);
}

double ConfidenceFlat(std::size_t n, double p_start, double p_end) {
  if (n <= 1) return 1.0;
  return Clamp01(1.0 - (FlatEntropy(n, p_start) + FlatEntropy(n, p_end)) / 2.0);
}

double ResponseConfidence(const model_client::ModelResponse& response) {
  if (const auto* full = std::get_if<model_client::FullDistribution>(&response.distribution)) {
    return Confidence({full->start_probs, full->end_probs, full->tokens.size()});
  }
  const auto& top = std::get<model_client::TopOnlyDistribution>(response.distribution);
  return ConfidenceFlat(top.num_tokens, top.start_top_prob, top.end_top_prob);
}

std::string EnsembleAnswer(const std::array<std::string, 3>& answers) {
  std::map<std::u32string, int> votes;
  std::vector<std::pair<std::u32string, std::u32string>> order;  // key, surface
  for (const std::string& answer : answers) {
    std::set<std::u32string> seen;
    for (const text::Token& token : text::Tokenize(text::DecodeUtf8(answer))) {
      std::u32string key = text::ToLower(token.text);
      if (!seen.insert(key).second) continue;
      if (votes[key]++ == 0) order.emplace_back(key, token.text);
    }
  }
  std::u32string out;
  for (const auto& [key, surface] : order) {
    if (votes[key] < 2) continue;
    if (!out.empty()) out += U' ';
    out += surface;
  }
  return text::EncodeUtf8(out);
}

std::string_view ToString(TrainingAmount amount) {
  switch (amount) {
    case TrainingAmount::kNone: return "none";
    case TrainingAmount::kHalf: return "half";
    case TrainingAmount::kFull: return "full";
    case TrainingAmount::kBoth: return "both";
    case TrainingAmount::kEns: return "ens";
  }
  return "none";
}

TrainingAmount ParseTrainingAmount(std::string_view name) {
  for (TrainingAmount a : {TrainingAmount::kNone, TrainingAmount::kHalf,
                           TrainingAmount::kFull, TrainingAmount::kBoth,
                           TrainingAmount::kEns}) {
    if (ToString(a) == name) return a;
  }
  throw ConfigError("unknown training amount: " + std::string(name));
}

EvalRecord ScoreAnswer(std::string qa_id, std::string model_answer,
                       std::vector<std::string> gold_answers, double confidence,
                       TrainingAmount amount) {
  EvalRecord record;
  record.qa_id = std::move(qa_id);
  record.em = ExactMatch(model_answer, gold_answers);
  record.f1 = std::max(F1Score(model_answer, gold_answers), static_cast<double>(record.em));
  record.confidence = Clamp01(confidence);
  record.is_error = record.em == 0;
  record.model_answer = std::move(model_answer);
  record.gold_answers = std::move(gold_answers);
  record.training_amount = amount;
  return record;
}

std::vector<EvalRecord> EvaluateDataset(const corpus::Dataset& dataset,
                                        model_client::Predictor& predictor,
                                        TrainingAmount amount,
                                        std::size_t max_in_flight) {
  std::vector<model_client::ModelRequest> requests;
  std::vector<const corpus::QA*> qas;
  corpus::ForEachParagraph(dataset, [&](std::size_t, const corpus::Paragraph& p) {
    for (const corpus::QA& qa : p.qas) {
      requests.push_back({p.context, qa.question});
      qas.push_back(&qa);
    }
  });
  const auto outcomes = model_client::PredictAll(predictor, requests, max_in_flight);

  std::vector<EvalRecord> records;
  records.reserve(qas.size());
  for (std::size_t i = 0; i < qas.size(); ++i) {
    const corpus::QA& qa = *qas[i];
    std::vector<std::string> golds;
    for (const corpus::AnswerSpan& a : qa.answers) golds.push_back(a.text);
    EvalRecord record;
    if (outcomes[i].ok()) {
      const auto& response = *outcomes[i].response;
      record = ScoreAnswer(qa.id, response.answer_text, std::move(golds),
                           ResponseConfidence(response), amount);
    } else {
      record.qa_id = qa.id;
      record.gold_answers = std::move(golds);
      record.training_amount = amount;
      record.failure = outcomes[i].error.empty() ? "model query failed" : outcomes[i].error;
    }
    record.perturbation = qa.perturbation;
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<EvalRecord> EnsembleRecords(
    const std::array<std::vector<EvalRecord>, 3>& runs) {
  const std::size_t n = runs[0].size();
  if (runs[1].size() != n || runs[2].size() != n) {
    throw JoinError("ensemble runs have different lengths");
  }
  std::vector<EvalRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const EvalRecord& first = runs[0][i];
    for (int m = 1; m < 3; ++m) {
      if (runs[m][i].qa_id != first.qa_id) {
        throw JoinError("ensemble runs disagree at row " + std::to_string(i) + ": " +
                        first.qa_id + " vs " + runs[m][i].qa_id);
      }
    }
    std::string failure;
    for (int m = 0; m < 3; ++m) {
      if (runs[m][i].failed()) failure = "member failed: " + runs[m][i].failure;
    }
    EvalRecord record;
    if (failure.empty()) {
      const std::string answer = EnsembleAnswer(
          {runs[0][i].model_answer, runs[1][i].model_answer, runs[2][i].model_answer});
      const double confidence =
          (runs[0][i].confidence + runs[1][i].confidence + runs[2][i].confidence) / 3.0;
      record = ScoreAnswer(first.qa_id, answer, first.gold_answers, confidence,
                           TrainingAmount::kEns);
    } else {
      record.qa_id = first.qa_id;
      record.gold_answers = first.gold_answers;
      record.training_amount = TrainingAmount::kEns;
      record.failure = failure;
    }
    record.perturbation = first.perturbation;
    out.push_back(std::move(record));
  }
  return out;
}

json ToJson(const EvalRecord& r) {
  json j = {{"qa_id", r.qa_id},
            {"training_amount", ToString(r.training_amount)},
            {"perturbation_type", MetaType(r.perturbation)},
            {"perturbation_amount", MetaAmount(r.perturbation)},
            {"em", r.em},
            {"f1", r.f1},
            {"confidence", r.confidence},
            {"is_error", r.is_error},
            {"model_answer", r.model_answer},
            {"gold_answers", r.gold_answers}};
  if (r.failed()) j["failure"] = r.failure;
  return j;
}

EvalRecord RecordFromJson(const json& j) {
  EvalRecord r;
  r.qa_id = j.at("qa_id").get<std::string>();
  r.training_amount = ParseTrainingAmount(j.at("training_amount").get<std::string>());
  const auto type = corpus::ParsePerturbationType(j.value("perturbation_type", "none"));
  const auto amount = corpus::ParseAmount(j.value("perturbation_amount", "none"));
  if (type != corpus::PerturbationType::kNone) r.perturbation = corpus::PerturbationMeta{type, amount};
  r.em = j.at("em").get<int>();
  r.f1 = j.at("f1").get<double>();
  r.confidence = j.at("confidence").get<double>();
  r.is_error = j.at("is_error").get<bool>();
  r.model_answer = j.at("model_answer").get<std::string>();
  r.gold_answers = j.at("gold_answers").get<std::vector<std::string>>();
  r.failure = j.value("failure", "");
  return r;
}

std::string RecordsToJsonl(std::span<const EvalRecord> records) {
  std::string out;
  for (const EvalRecord& r : records) {
    out += ToJson(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<EvalRecord> RecordsFromJsonl(std::string_view jsonl) {
  std::vector<EvalRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    const std::string_view line = jsonl.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      records.push_back(RecordFromJson(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid eval record: ") + e.what(), line_no,
                       ParseError::Unit::kLine);
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), line_no, ParseError::Unit::kLine);
    }
  }
  return records;
}

const std::array<std::string_view, 11> kCsvColumns = {
    "qa_id", "training_amount", "perturbation_type", "perturbation_amount",
    "em", "f1", "confidence", "is_error", "model_answer", "gold_answers", "failure"};

std::string RecordsToCsv(std::span<const EvalRecord> records) {
  std::string out;
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    if (i) out += ',';
    out += kCsvColumns[i];
  }
  out += '\n';
  for (const EvalRecord& r : records) {
    const std::vector<std::string> fields = {
        r.qa_id, std::string(ToString(r.training_amount)), MetaType(r.perturbation),
        MetaAmount(r.perturbation), std::to_string(r.em), FormatDouble(r.f1),
        FormatDouble(r.confidence), r.is_error ? "1" : "0", r.model_answer,
        json(r.gold_answers).dump(), r.failure};
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += io::CsvField(fields[i]);
    }
    out += '\n';
  }
  return out;
}

std::string FormatDouble(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, end);
}

}  // namespace advspan::eval
