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

#include "advspan/corpus.h"

#include <set>
#include <unordered_set>

#include "advspan/error.h"

namespace advspan::corpus {

using nlohmann::json;

namespace {

constexpr const char* kMetaKey = "x_perturbation";

json Extra(const json& object, std::initializer_list<const char*> known) {
  json extra = json::object();
  for (auto it = object.begin(); it != object.end(); ++it) {
    bool is_known = false;
    for (const char* k : known) is_known = is_known || it.key() == k;
    if (!is_known) extra[it.key()] = it.value();
  }
  return extra;
}

const json& Require(const json& object, const char* key, json::value_t type,
                    const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw ValidationError(where + ": missing \"" + key + "\"");
  }
  const bool ok = it->type() == type ||
                  (type == json::value_t::number_integer &&
                   it->type() == json::value_t::number_unsigned);
  if (!ok) throw ValidationError(where + ": \"" + key + "\" has the wrong type");
  return *it;
}

std::string IdOf(const json& qa, const std::string& where) {
  auto it = qa.find("id");
  if (it == qa.end()) throw ValidationError(where + ": missing \"id\"");
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<int64_t>());
  throw ValidationError(where + ": \"id\" has the wrong type");
}

enum class SpanCheck { kOk, kMisplaced, kAbsent };

SpanCheck CheckSpan(const std::u32string& context, const std::u32string& text,
                    std::size_t start) {
  if (start <= context.size() && text.size() <= context.size() - start &&
      context.compare(start, text.size(), text) == 0) {
    return SpanCheck::kOk;
  }
  return context.find(text) == std::u32string::npos ? SpanCheck::kAbsent
                                                    : SpanCheck::kMisplaced;
}

PerturbationMeta ParseMeta(const json& j) {
  PerturbationMeta meta;
  if (auto it = j.find("type"); it != j.end() && it->is_string()) {
    meta.type = ParsePerturbationType(it->get<std::string>());
  }
  if (auto it = j.find("amount"); it != j.end() && it->is_string()) {
    meta.amount = ParseAmount(it->get<std::string>());
  }
  return meta;
}

}  // namespace

std::string_view ToString(PerturbationType type) {
  switch (type) {
    case PerturbationType::kNone: return "none";
    case PerturbationType::kChar: return "char";
    case PerturbationType::kWord: return "word";
    case PerturbationType::kPara: return "para";
  }
  return "none";
}

std::string_view ToString(Amount amount) {
  switch (amount) {
    case Amount::kNone: return "none";
    case Amount::kHalf: return "half";
    case Amount::kFull: return "full";
    case Amount::kBoth: return "both";
  }
  return "none";
}

PerturbationType ParsePerturbationType(std::string_view name) {
  if (name == "none") return PerturbationType::kNone;
  if (name == "char") return PerturbationType::kChar;
  if (name == "word") return PerturbationType::kWord;
  if (name == "para") return PerturbationType::kPara;
  throw ConfigError("unknown perturbation type: " + std::string(name));
}

Amount ParseAmount(std::string_view name) {
  if (name == "none") return Amount::kNone;
  if (name == "half") return Amount::kHalf;
  if (name == "full") return Amount::kFull;
  if (name == "both") return Amount::kBoth;
  throw ConfigError("unknown perturbation amount: " + std::string(name));
}

std::size_t Dataset::paragraph_count() const {
  std::size_t n = 0;
  for (const Article& a : articles) n += a.paragraphs.size();
  return n;
}

std::size_t Dataset::qa_count() const {
  std::size_t n = 0;
  for (const Article& a : articles)
    for (const Paragraph& p : a.paragraphs) n += p.qas.size();
  return n;
}

Dataset ParseDataset(std::string_view bytes, ParseStats* stats) {
  json root;
  try {
    root = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte,
                     ParseError::Unit::kByte);
  }
  if (!root.is_object()) throw ValidationError("dataset: top level is not an object");

  ParseStats local;
  ParseStats& counts = stats ? *stats : local;
  counts = ParseStats{};

  Dataset dataset;
  if (auto it = root.find("version"); it != root.end() && it->is_string()) {
    dataset.version = it->get<std::string>();
  }
  dataset.extra = Extra(root, {"data", "version"});
  std::unordered_set<std::string> seen_ids;

  const json& data = Require(root, "data", json::value_t::array, "dataset");
  for (std::size_t ai = 0; ai < data.size(); ++ai) {
    const json& aj = data[ai];
    const std::string where = "article " + std::to_string(ai);
    if (!aj.is_object()) throw ValidationError(where + ": not an object");
    Article article;
    if (auto it = aj.find("title"); it != aj.end() && it->is_string()) {
      article.title = it->get<std::string>();
    }
    article.extra = Extra(aj, {"title", "paragraphs"});

    const json& paragraphs =
        Require(aj, "paragraphs", json::value_t::array, where);
    for (std::size_t pi = 0; pi < paragraphs.size(); ++pi) {
      const json& pj = paragraphs[pi];
      const std::string pwhere = where + " paragraph " + std::to_string(pi);
      if (!pj.is_object()) throw ValidationError(pwhere + ": not an object");
      Paragraph paragraph;
      paragraph.context =
          Require(pj, "context", json::value_t::string, pwhere).get<std::string>();
      if (paragraph.context.empty()) {
        throw ValidationError(pwhere + ": empty context");
      }
      paragraph.extra = Extra(pj, {"context", "qas"});
      const std::u32string context = text::DecodeUtf8(paragraph.context);

      const json& qas = Require(pj, "qas", json::value_t::array, pwhere);
      if (qas.empty()) throw ValidationError(pwhere + ": no questions");
      for (const json& qj : qas) {
        if (!qj.is_object()) throw ValidationError(pwhere + ": QA is not an object");
        QA qa;
        qa.id = IdOf(qj, pwhere);
        const std::string qwhere = "QA " + qa.id;
        qa.question =
            Require(qj, "question", json::value_t::string, qwhere).get<std::string>();
        qa.extra = Extra(qj, {"id", "question", "answers", kMetaKey});
        if (auto it = qj.find(kMetaKey); it != qj.end() && it->is_object()) {
          qa.perturbation = ParseMeta(*it);
        }
        const json& answers = Require(qj, "answers", json::value_t::array, qwhere);
        for (const json& anj : answers) {
          if (!anj.is_object()) throw ValidationError(qwhere + ": answer is not an object");
          AnswerSpan answer;
          answer.text =
              Require(anj, "text", json::value_t::string, qwhere).get<std::string>();
          const json& start =
              Require(anj, "answer_start", json::value_t::number_integer, qwhere);
          if (start.get<int64_t>() < 0) {
            throw ValidationError(qwhere + ": negative answer_start");
          }
          answer.answer_start = start.get<std::size_t>();
          answer.extra = Extra(anj, {"text", "answer_start"});
          switch (CheckSpan(context, text::DecodeUtf8(answer.text),
                            answer.answer_start)) {
            case SpanCheck::kOk:
              qa.answers.push_back(std::move(answer));
              break;
            case SpanCheck::kMisplaced:
              throw ValidationError(qwhere + ": answer \"" + answer.text +
                                    "\" does not match the context at offset " +
                                    std::to_string(answer.answer_start));
            case SpanCheck::kAbsent:
              ++counts.dropped_answers;
              break;
          }
        }
        if (!answers.empty() && qa.answers.empty()) {
          ++counts.dropped_qas;
          continue;
        }
        if (!seen_ids.insert(qa.id).second) {
          throw ValidationError("duplicate QA id " + qa.id);
        }
        paragraph.qas.push_back(std::move(qa));
      }
      if (paragraph.qas.empty()) {
        ++counts.dropped_paragraphs;
        continue;
      }
      article.paragraphs.push_back(std::move(paragraph));
    }
    dataset.articles.push_back(std::move(article));
  }
  return dataset;
}

json ToJson(const Dataset& dataset) {
  json root = dataset.extra;
  root["version"] = dataset.version;
  json data = json::array();
  for (const Article& article : dataset.articles) {
    json aj = article.extra;
    aj["title"] = article.title;
    json paragraphs = json::array();
    for (const Paragraph& paragraph : article.paragraphs) {
      json pj = paragraph.extra;
      pj["context"] = paragraph.context;
      json qas = json::array();
      for (const QA& qa : paragraph.qas) {
        json qj = qa.extra;
        qj["id"] = qa.id;
        qj["question"] = qa.question;
        json answers = json::array();
        for (const AnswerSpan& answer : qa.answers) {
          json anj = answer.extra;
          anj["text"] = answer.text;
          anj["answer_start"] = answer.answer_start;
          answers.push_back(std::move(anj));
        }
        qj["answers"] = std::move(answers);
        if (qa.perturbation) {
          qj[kMetaKey] = {{"type", ToString(qa.perturbation->type)},
                          {"amount", ToString(qa.perturbation->amount)}};
        }
        qas.push_back(std::move(qj));
      }
      pj["qas"] = std::move(qas);
      paragraphs.push_back(std::move(pj));
    }
    aj["paragraphs"] = std::move(paragraphs);
    data.push_back(std::move(aj));
  }
  root["data"] = std::move(data);
  return root;
}

std::string SerializeDataset(const Dataset& dataset) {
  return ToJson(dataset).dump() + "\n";
}

void ValidateDataset(const Dataset& dataset) {
  std::set<std::string> ids;
  ForEachParagraph(dataset, [&](std::size_t index, const Paragraph& paragraph) {
    if (paragraph.context.empty()) {
      throw ValidationError("paragraph " + std::to_string(index) + ": empty context");
    }
    if (paragraph.qas.empty()) {
      throw ValidationError("paragraph " + std::to_string(index) + ": no questions");
    }
    const std::u32string context = text::DecodeUtf8(paragraph.context);
    for (const QA& qa : paragraph.qas) {
      if (!ids.insert(qa.id).second) throw ValidationError("duplicate QA id " + qa.id);
      for (const AnswerSpan& answer : qa.answers) {
        if (CheckSpan(context, text::DecodeUtf8(answer.text), answer.answer_start) !=
            SpanCheck::kOk) {
          throw ValidationError("QA " + qa.id + ": answer \"" + answer.text +
                                "\" does not match the context");
        }
      }
    }
  });
}

std::vector<text::Interval> AnswerRegions(const Paragraph& paragraph) {
  std::vector<text::Interval> spans;
  for (const QA& qa : paragraph.qas) {
    for (const AnswerSpan& answer : qa.answers) {
      spans.push_back({answer.answer_start,
                       answer.answer_start + text::CodepointLength(answer.text)});
    }
  }
  return text::MergeIntervals(std::move(spans));
}

std::vector<QA> RemapAnswers(const std::vector<QA>& qas, const OffsetMap& map) {
  std::vector<QA> out = qas;
  for (QA& qa : out) {
    for (AnswerSpan& answer : qa.answers) {
      const std::size_t length = text::CodepointLength(answer.text);
      auto image = map.Map({answer.answer_start, answer.answer_start + length});
      if (!image) {
        throw SpanProtectionError("QA " + qa.id + ": answer \"" + answer.text +
                                  "\" overlaps a rewritten region");
      }
      answer.answer_start = image->begin;
    }
  }
  return out;
}

}  // namespace advspan::corpus
