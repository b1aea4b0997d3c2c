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

#include "advspan/features.h"

#include <algorithm>
#include <map>

#include "advspan/error.h"
#include "advspan/io.h"
#include "advspan/perturb.h"
#include "advspan/text.h"

namespace advspan::analysis {

using nlohmann::json;

namespace {

bool IsVowel(char32_t c) {
  return c == U'a' || c == U'e' || c == U'i' || c == U'o' || c == U'u' || c == U'y';
}

void ParseLines(std::string_view jsonl, auto&& fn) {
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
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid feature row: ") + e.what(), line_no,
                       ParseError::Unit::kLine);
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), line_no, ParseError::Unit::kLine);
    }
  }
}

}  // namespace

std::string_view ToString(QuestionType type) {
  switch (type) {
    case QuestionType::kWho: return "who";
    case QuestionType::kWhat: return "what";
    case QuestionType::kWhich: return "which";
    case QuestionType::kWhen: return "when";
    case QuestionType::kWhere: return "where";
    case QuestionType::kWhy: return "why";
    case QuestionType::kHow: return "how";
    case QuestionType::kOther: return "other";
  }
  return "other";
}

QuestionType ParseQuestionType(std::string_view name) {
  for (QuestionType t : kQuestionTypes) {
    if (ToString(t) == name) return t;
  }
  throw ConfigError("unknown question type: " + std::string(name));
}

QuestionType QuestionTypeOf(std::string_view question) {
  const std::vector<text::Token> tokens = text::Tokenize(text::DecodeUtf8(question));
  if (tokens.empty()) return QuestionType::kOther;
  const std::string first = text::EncodeUtf8(text::ToLower(tokens.front().text));
  for (QuestionType t : kQuestionTypes) {
    if (t != QuestionType::kOther && ToString(t) == first) return t;
  }
  return QuestionType::kOther;
}

std::size_t CountSyllables(std::u32string_view word) {
  const std::u32string lower = text::ToLower(word);
  std::size_t groups = 0;
  bool in_group = false;
  for (char32_t c : lower) {
    const bool vowel = IsVowel(c);
    if (vowel && !in_group) ++groups;
    in_group = vowel;
  }
  if (!lower.empty() && lower.back() == U'e' && groups > 0) --groups;
  return std::max<std::size_t>(groups, 1);
}

double FleschKincaid(std::string_view text) {
  const std::u32string text32 = text::DecodeUtf8(text);
  const std::vector<text::Token> words = text::Tokenize(text32);
  if (words.empty()) throw UndefinedInputError("readability needs at least one word");
  const std::size_t sentences =
      std::max<std::size_t>(perturb::SplitSentences(std::u32string_view(text32)).size(), 1);
  std::size_t syllables = 0;
  for (const text::Token& w : words) syllables += CountSyllables(w.text);
  const double n = static_cast<double>(words.size());
  return 0.39 * (n / static_cast<double>(sentences)) +
         11.8 * (static_cast<double>(syllables) / n) - 15.59;
}

double HumanAgreement(const std::vector<std::string>& golds) {
  if (golds.empty()) throw UndefinedInputError("agreement needs at least one answer");
  std::map<std::string, std::size_t> counts;
  std::size_t modal = 0;
  for (const std::string& g : golds) modal = std::max(modal, ++counts[eval::NormalizeAnswer(g)]);
  return static_cast<double>(modal) / static_cast<double>(golds.size());
}

std::size_t TokenCount(std::string_view text) {
  return text::Tokenize(text::DecodeUtf8(text)).size();
}

std::unordered_map<std::string, QaContext> IndexContexts(const corpus::Dataset& dataset) {
  std::unordered_map<std::string, QaContext> index;
  corpus::ForEachParagraph(dataset, [&](std::size_t, const corpus::Paragraph& p) {
    const std::size_t context_length = TokenCount(p.context);
    const double readability = context_length ? FleschKincaid(p.context) : 0.0;
    for (const corpus::QA& qa : p.qas) {
      index[qa.id] = {qa.question, TokenCount(qa.question), context_length, readability};
    }
  });
  return index;
}

std::vector<FeatureVector> BuildFeatures(std::span<const eval::EvalRecord> records,
                                         const corpus::Dataset& dataset) {
  std::vector<FeatureVector> out;
  if (records.empty()) return out;
  const auto index = IndexContexts(dataset);
  for (const eval::EvalRecord& r : records) {
    if (r.failed()) continue;
    if (r.training_amount == eval::TrainingAmount::kEns) {
      throw ValidationError("ens records have no training amount feature: " + r.qa_id);
    }
    if (!r.perturbation || r.perturbation->type == corpus::PerturbationType::kNone) {
      throw ValidationError("record has no perturbation type: " + r.qa_id);
    }
    auto it = index.find(r.qa_id);
    if (it == index.end()) throw JoinError("record id not in dataset: " + r.qa_id);
    FeatureVector f;
    f.qa_id = r.qa_id;
    f.training_amount = r.training_amount;
    f.perturbation_type = r.perturbation->type;
    f.question_type = QuestionTypeOf(it->second.question);
    f.question_length = it->second.question_length;
    f.context_length = it->second.context_length;
    f.answer_length = TokenCount(r.model_answer);
    f.readability = it->second.readability;
    f.human_agreement = r.gold_answers.empty() ? 1.0 : HumanAgreement(r.gold_answers);
    f.confidence = r.confidence;
    f.label = r.is_error ? 1 : 0;
    out.push_back(std::move(f));
  }
  return out;
}

EncodedMatrix Encode(std::span<const FeatureVector> features,
                     const FeatureOptions& options) {
  static constexpr std::array kAmounts = {eval::TrainingAmount::kNone, eval::TrainingAmount::kHalf,
                                          eval::TrainingAmount::kFull, eval::TrainingAmount::kBoth};
  static constexpr std::array kTypes = {corpus::PerturbationType::kChar,
                                        corpus::PerturbationType::kWord,
                                        corpus::PerturbationType::kPara};
  EncodedMatrix m;
  auto column = [&](std::string name, std::string group) {
    m.columns.push_back(std::move(name));
    m.groups.push_back(std::move(group));
  };
  for (auto a : kAmounts) column("training_amount=" + std::string(eval::ToString(a)), "training_amount");
  for (auto t : kTypes) column("perturbation_type=" + std::string(corpus::ToString(t)), "perturbation_type");
  for (auto q : kQuestionTypes) column("question_type=" + std::string(ToString(q)), "question_type");
  for (const char* name : {"question_length", "context_length", "answer_length", "readability"}) {
    column(name, name);
  }
  if (options.include_human_agreement) column("human_agreement", "human_agreement");
  if (options.include_confidence) column("confidence", "confidence");

  for (const FeatureVector& f : features) {
    std::vector<double> row;
    row.reserve(m.columns.size());
    for (auto a : kAmounts) row.push_back(f.training_amount == a ? 1.0 : 0.0);
    for (auto t : kTypes) row.push_back(f.perturbation_type == t ? 1.0 : 0.0);
    for (auto q : kQuestionTypes) row.push_back(f.question_type == q ? 1.0 : 0.0);
    row.push_back(static_cast<double>(f.question_length));
    row.push_back(static_cast<double>(f.context_length));
    row.push_back(static_cast<double>(f.answer_length));
    row.push_back(f.readability);
    if (options.include_human_agreement) row.push_back(f.human_agreement);
    if (options.include_confidence) row.push_back(f.confidence);
    m.rows.push_back(std::move(row));
    m.labels.push_back(f.label);
  }
  return m;
}

json ToJson(const FeatureVector& f) {
  return {{"qa_id", f.qa_id},
          {"training_amount", eval::ToString(f.training_amount)},
          {"perturbation_type", corpus::ToString(f.perturbation_type)},
          {"question_type", ToString(f.question_type)},
          {"question_length", f.question_length},
          {"context_length", f.context_length},
          {"answer_length", f.answer_length},
          {"readability", f.readability},
          {"human_agreement", f.human_agreement},
          {"confidence", f.confidence},
          {"label", f.label}};
}

FeatureVector FeatureFromJson(const json& j) {
  FeatureVector f;
  f.qa_id = j.at("qa_id").get<std::string>();
  f.training_amount = eval::ParseTrainingAmount(j.at("training_amount").get<std::string>());
  f.perturbation_type = corpus::ParsePerturbationType(j.at("perturbation_type").get<std::string>());
  f.question_type = ParseQuestionType(j.at("question_type").get<std::string>());
  f.question_length = j.at("question_length").get<std::size_t>();
  f.context_length = j.at("context_length").get<std::size_t>();
  f.answer_length = j.at("answer_length").get<std::size_t>();
  f.readability = j.at("readability").get<double>();
  f.human_agreement = j.value("human_agreement", 1.0);
  f.confidence = j.value("confidence", 0.0);
  f.label = j.at("label").get<int>();
  if (f.training_amount == eval::TrainingAmount::kEns ||
      f.perturbation_type == corpus::PerturbationType::kNone || (f.label != 0 && f.label != 1)) {
    throw ConfigError("feature row out of range: " + f.qa_id);
  }
  return f;
}

std::string FeaturesToJsonl(std::span<const FeatureVector> features) {
  std::string out;
  for (const FeatureVector& f : features) {
    out += ToJson(f).dump();
    out += '\n';
  }
  return out;
}

std::vector<FeatureVector> FeaturesFromJsonl(std::string_view jsonl) {
  std::vector<FeatureVector> out;
  ParseLines(jsonl, [&](const json& j) { out.push_back(FeatureFromJson(j)); });
  return out;
}

std::string FeaturesToCsv(std::span<const FeatureVector> features) {
  std::string out =
      "qa_id,training_amount,perturbation_type,question_type,question_length,"
      "context_length,answer_length,readability,human_agreement,confidence,label\n";
  for (const FeatureVector& f : features) {
    out += io::CsvField(f.qa_id) + ',' + std::string(eval::ToString(f.training_amount)) + ',' +
           std::string(corpus::ToString(f.perturbation_type)) + ',' +
           std::string(ToString(f.question_type)) + ',' + std::to_string(f.question_length) +
           ',' + std::to_string(f.context_length) + ',' + std::to_string(f.answer_length) + ',' +
           eval::FormatDouble(f.readability) + ',' + eval::FormatDouble(f.human_agreement) +
           ',' + eval::FormatDouble(f.confidence) + ',' + std::to_string(f.label) + '\n';
  }
  return out;
}

}  // namespace advspan::analysis
