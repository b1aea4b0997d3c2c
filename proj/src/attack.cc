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

#include "advspan/attack.h"

#include <algorithm>
#include <map>
#include <set>

#include "advspan/error.h"
#include "advspan/eval.h"

namespace advspan::attack {

using nlohmann::json;

namespace {

double SignedConfidence(bool correct, double confidence) {
  return correct ? confidence : -confidence;
}

json IntervalJson(const text::Interval& span) {
  return {{"begin", span.begin}, {"end", span.end}};
}

text::Interval IntervalFromJson(const json& j) {
  return {j.at("begin").get<std::size_t>(), j.at("end").get<std::size_t>()};
}

}  // namespace

std::string DeleteSpan(std::u32string_view context, const text::Interval& span) {
  std::u32string_view left = context.substr(0, span.begin);
  std::u32string_view right = context.substr(span.end);
  while (!left.empty() && text::IsSpace(left.back())) left.remove_suffix(1);
  while (!right.empty() && text::IsSpace(right.front())) right.remove_prefix(1);
  std::u32string out(left);
  if (!left.empty() && !right.empty()) out += U' ';
  out += right;
  return text::EncodeUtf8(out);
}

std::vector<text::Token> EligibleTokens(const corpus::Paragraph& paragraph) {
  const std::vector<text::Interval> protected_spans = corpus::AnswerRegions(paragraph);
  std::vector<text::Token> eligible;
  for (text::Token& token : text::Tokenize(text::DecodeUtf8(paragraph.context))) {
    if (!text::IntersectsAny(token.span, protected_spans)) eligible.push_back(std::move(token));
  }
  return eligible;
}

ImportanceResult ImportanceScores(const corpus::Paragraph& paragraph,
                                  const corpus::QA& qa,
                                  model_client::Predictor& predictor,
                                  std::size_t max_in_flight) {
  std::vector<std::string> golds;
  for (const corpus::AnswerSpan& a : qa.answers) golds.push_back(a.text);

  ImportanceResult result;
  result.qa_id = qa.id;
  const model_client::ModelResponse base = predictor.Predict({paragraph.context, qa.question});
  result.queries = 1;
  result.base_correct = eval::ExactMatch(base.answer_text, golds) == 1;
  result.base_confidence = eval::ResponseConfidence(base);
  const double c_base = SignedConfidence(result.base_correct, result.base_confidence);

  const std::u32string context = text::DecodeUtf8(paragraph.context);
  const std::vector<text::Token> tokens = EligibleTokens(paragraph);
  std::vector<model_client::ModelRequest> requests;
  requests.reserve(tokens.size());
  for (const text::Token& token : tokens) {
    requests.push_back({DeleteSpan(context, token.span), qa.question});
  }
  const auto outcomes = model_client::PredictAll(predictor, requests, max_in_flight);
  result.queries += requests.size();

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string token = text::EncodeUtf8(tokens[i].text);
    if (!outcomes[i].ok()) {
      result.failures.push_back({token, tokens[i].span, outcomes[i].error});
      continue;
    }
    const auto& response = *outcomes[i].response;
    ImportanceScore score;
    score.token = token;
    score.position = tokens[i].span;
    score.base_correct = result.base_correct;
    score.ablated_correct = eval::ExactMatch(response.answer_text, golds) == 1;
    score.score = c_base - SignedConfidence(score.ablated_correct,
                                            eval::ResponseConfidence(response));
    result.scores.push_back(std::move(score));
  }
  return result;
}

std::vector<ImportanceScore> MaxAggregate(std::span<const ImportanceResult> results) {
  std::map<text::Interval, ImportanceScore> best;
  for (const ImportanceResult& result : results) {
    for (const ImportanceScore& score : result.scores) {
      auto [it, inserted] = best.emplace(score.position, score);
      if (!inserted && score.score > it->second.score) it->second = score;
    }
  }
  std::vector<ImportanceScore> out;
  out.reserve(best.size());
  for (auto& [position, score] : best) out.push_back(std::move(score));
  return out;
}

ConstraintSpec TopKConstraints(std::span<const ImportanceScore> scores,
                               std::string_view context, std::size_t k,
                               std::size_t paragraph_index) {
  if (k == 0) throw ConfigError("constraint count must be at least 1");
  std::vector<const ImportanceScore*> ranked;
  for (const ImportanceScore& s : scores) ranked.push_back(&s);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const ImportanceScore* a, const ImportanceScore* b) {
                     if (a->score != b->score) return a->score > b->score;
                     return a->position < b->position;
                   });

  std::vector<std::u32string> chosen_keys;
  std::vector<std::string> chosen;
  for (const ImportanceScore* s : ranked) {
    if (chosen.size() == k) break;
    std::u32string key = text::ToLower(text::DecodeUtf8(s->token));
    if (std::find(chosen_keys.begin(), chosen_keys.end(), key) != chosen_keys.end()) continue;
    chosen_keys.push_back(std::move(key));
    chosen.push_back(s->token);
  }

  const std::u32string text32 = text::DecodeUtf8(context);
  const std::vector<text::Interval> sentences = perturb::SplitSentences(std::u32string_view(text32));
  std::map<std::size_t, std::set<std::size_t>> by_sentence;  // sentence -> chosen indices
  for (const text::Token& token : text::Tokenize(text32)) {
    const std::u32string key = text::ToLower(token.text);
    auto it = std::find(chosen_keys.begin(), chosen_keys.end(), key);
    if (it == chosen_keys.end()) continue;
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      if (sentences[s].contains(token.span)) {
        by_sentence[s].insert(static_cast<std::size_t>(it - chosen_keys.begin()));
        break;
      }
    }
  }

  ConstraintSpec spec;
  spec.paragraph_index = paragraph_index;
  for (const auto& [sentence, indices] : by_sentence) {
    SentenceConstraints sc;
    sc.sentence_index = sentence;
    for (std::size_t i : indices) sc.negative_constraints.push_back(chosen[i]);
    spec.sentences.push_back(std::move(sc));
  }
  return spec;
}

std::string ConstraintsToJsonl(std::span<const ConstraintSpec> specs) {
  std::string out;
  for (const ConstraintSpec& spec : specs) {
    for (const SentenceConstraints& sc : spec.sentences) {
      out += json{{"paragraph_index", spec.paragraph_index},
                  {"sentence_index", sc.sentence_index},
                  {"negative_constraints", sc.negative_constraints}}
                 .dump();
      out += '\n';
    }
  }
  return out;
}

json ToJson(const ImportanceResult& result) {
  json scores = json::array();
  for (const ImportanceScore& s : result.scores) {
    scores.push_back({{"token", s.token},
                      {"position", IntervalJson(s.position)},
                      {"score", s.score},
                      {"base_correct", s.base_correct},
                      {"ablated_correct", s.ablated_correct}});
  }
  json failures = json::array();
  for (const TokenFailure& f : result.failures) {
    failures.push_back({{"token", f.token},
                        {"position", IntervalJson(f.position)},
                        {"error", f.error}});
  }
  return {{"paragraph_index", result.paragraph_index},
          {"qa_id", result.qa_id},
          {"base_correct", result.base_correct},
          {"base_confidence", result.base_confidence},
          {"queries", result.queries},
          {"scores", scores},
          {"failures", failures}};
}

std::string ImportanceToJsonl(std::span<const ImportanceResult> results) {
  std::string out;
  for (const ImportanceResult& r : results) {
    out += ToJson(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<ImportanceResult> ImportanceFromJsonl(std::string_view jsonl) {
  std::vector<ImportanceResult> results;
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
      const json j = json::parse(line);
      ImportanceResult r;
      r.paragraph_index = j.at("paragraph_index").get<std::size_t>();
      r.qa_id = j.at("qa_id").get<std::string>();
      r.base_correct = j.at("base_correct").get<bool>();
      r.base_confidence = j.at("base_confidence").get<double>();
      r.queries = j.at("queries").get<std::size_t>();
      for (const json& s : j.at("scores")) {
        r.scores.push_back({s.at("token").get<std::string>(),
                            IntervalFromJson(s.at("position")),
                            s.at("score").get<double>(),
                            s.at("base_correct").get<bool>(),
                            s.at("ablated_correct").get<bool>()});
      }
      for (const json& f : j.value("failures", json::array())) {
        r.failures.push_back({f.at("token").get<std::string>(),
                              IntervalFromJson(f.at("position")),
                              f.at("error").get<std::string>()});
      }
      results.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid importance record: ") + e.what(), line_no,
                       ParseError::Unit::kLine);
    }
  }
  return results;
}

corpus::Dataset ApplyStrategicParaphrases(const corpus::Dataset& dataset,
                                          const perturb::ParaphraseSets& sets) {
  perturb::PerturbationSpec spec;
  spec.type = corpus::PerturbationType::kPara;
  spec.amount = corpus::Amount::kFull;
  perturb::Resources resources;
  resources.paraphrases = &sets;
  const corpus::PerturbationMeta meta{spec.type, spec.amount};

  corpus::Dataset out = dataset;
  std::size_t index = 0;
  for (corpus::Article& article : out.articles) {
    for (corpus::Paragraph& paragraph : article.paragraphs) {
      if (sets.count(index)) {
        paragraph = perturb::PerturbParagraph(paragraph, index, spec, resources);
        for (corpus::QA& qa : paragraph.qas) qa.perturbation = meta;
      }
      ++index;
    }
  }
  return out;
}

}  // namespace advspan::attack
