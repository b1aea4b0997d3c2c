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

#include <gtest/gtest.h>

#include "advspan/error.h"
#include "synthetic.h"

namespace advspan::corpus {
namespace {

constexpr char kCurie[] = R"({"version": "1.1", "data": [{"title": "Warsaw", "paragraphs": [{
  "context": "One of the most famous people born in Warsaw was Maria Skłodowska-Curie, who achieved international recognition for her research on radioactivity and was the first female recipient of the Nobel Prize.",
  "qas": [{"id": "curie", "question": "What was Maria Curie the first female recipient of?",
           "answers": [{"text": "Nobel Prize", "answer_start": 188}],
           "note": "kept"}]}]}]})";

TEST(ParseDatasetTest, ReadsSquadLayoutWithCodepointOffsets) {
  const Dataset d = ParseDataset(kCurie);
  ASSERT_EQ(d.paragraph_count(), 1u);
  ASSERT_EQ(d.qa_count(), 1u);
  const QA& qa = d.articles[0].paragraphs[0].qas[0];
  EXPECT_EQ(qa.answers[0].answer_start, 188u);
  EXPECT_EQ(qa.extra.at("note"), "kept");
  EXPECT_FALSE(qa.is_perturbed());
}

TEST(ParseDatasetTest, SerializationRoundTrips) {
  const Dataset d = ParseDataset(kCurie);
  EXPECT_EQ(ParseDataset(SerializeDataset(d)), d);
  const Dataset synthetic = testing::MakeCorpus(30, 1).dataset;
  EXPECT_EQ(ParseDataset(SerializeDataset(synthetic)), synthetic);
}

TEST(ParseDatasetTest, PerturbationMetaRoundTrips) {
  Dataset d = ParseDataset(kCurie);
  d.articles[0].paragraphs[0].qas[0].perturbation = PerturbationMeta{PerturbationType::kWord, Amount::kHalf};
  const Dataset back = ParseDataset(SerializeDataset(d));
  EXPECT_EQ(back.articles[0].paragraphs[0].qas[0].perturbation, d.articles[0].paragraphs[0].qas[0].perturbation);
}

TEST(ParseDatasetTest, MalformedJsonReportsByteOffset) {
  try {
    ParseDataset(R"({"data": [)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.unit(), ParseError::Unit::kByte);
    EXPECT_GT(e.location(), 0u);
  }
}

TEST(ParseDatasetTest, DropsAnswersAbsentFromContext) {
  const char* json = R"({"data": [{"paragraphs": [{"context": "alpha beta gamma",
    "qas": [{"id": "a", "question": "q?", "answers": [{"text": "delta", "answer_start": 0},
                                                        {"text": "beta", "answer_start": 6}]},
            {"id": "b", "question": "q?", "answers": [{"text": "omega", "answer_start": 0}]}]}]}]})";
  ParseStats stats;
  const Dataset d = ParseDataset(json, &stats);
  EXPECT_EQ(stats.dropped_answers, 2u);
  EXPECT_EQ(stats.dropped_qas, 1u);
  ASSERT_EQ(d.qa_count(), 1u);
  EXPECT_EQ(d.articles[0].paragraphs[0].qas[0].answers.size(), 1u);
}

TEST(ParseDatasetTest, RejectsMisplacedAnswer) {
  const char* json = R"({"data": [{"paragraphs": [{"context": "alpha beta gamma",
    "qas": [{"id": "a", "question": "q?", "answers": [{"text": "beta", "answer_start": 2}]}]}]}]})";
  EXPECT_THROW(ParseDataset(json), ValidationError);
}

TEST(ParseDatasetTest, RejectsDuplicateIdsAndEmptyContext) {
  EXPECT_THROW(ParseDataset(R"({"data": [{"paragraphs": [{"context": "a b",
    "qas": [{"id": "x", "question": "q?", "answers": [{"text": "a", "answer_start": 0}]},
            {"id": "x", "question": "q?", "answers": [{"text": "b", "answer_start": 2}]}]}]}]})"),
               ValidationError);
  EXPECT_THROW(ParseDataset(R"({"data": [{"paragraphs": [{"context": "",
    "qas": [{"id": "x", "question": "q?", "answers": []}]}]}]})"),
               ValidationError);
}

TEST(AnswerRegionsTest, MergesOverlappingGoldSpans) {
  Paragraph p;
  p.context = "alpha beta gamma delta";
  p.qas.push_back({"1", "q", {{"beta", 6, {}}, {"beta gamma", 6, {}}}, std::nullopt, {}});
  p.qas.push_back({"2", "q", {{"delta", 17, {}}}, std::nullopt, {}});
  EXPECT_EQ(AnswerRegions(p), (std::vector<text::Interval>{{6, 16}, {17, 22}}));
}

TEST(RemapAnswersTest, ShiftsAndRejectsTouchedAnswers) {
  const std::vector<QA> qas = {{"1", "q", {{"gamma", 11, {}}}, std::nullopt, {}}};
  const OffsetMap shift = OffsetMap::FromEdits(22, {{{0, 5}, 7}});
  EXPECT_EQ(RemapAnswers(qas, shift)[0].answers[0].answer_start, 13u);
  const OffsetMap touch = OffsetMap::FromEdits(22, {{{12, 13}, 1}});
  EXPECT_THROW(RemapAnswers(qas, touch), SpanProtectionError);
}

TEST(NamesTest, ParseRejectsUnknownNames) {
  EXPECT_EQ(ParsePerturbationType("para"), PerturbationType::kPara);
  EXPECT_EQ(ParseAmount("both"), Amount::kBoth);
  EXPECT_THROW(ParseAmount("most"), ConfigError);
  EXPECT_THROW(ParsePerturbationType("sentence"), ConfigError);
}

}  // namespace
}  // namespace advspan::corpus
