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

#include <gtest/gtest.h>

#include <cmath>

#include "advspan/error.h"

namespace advspan::eval {
namespace {

TEST(NormalizeAnswerTest, FollowsSquadRules) {
  EXPECT_EQ(NormalizeAnswer("The  Nobel Prize."), "nobel prize");
  EXPECT_EQ(NormalizeAnswer("an apple, a pear"), "apple pear");
  EXPECT_EQ(NormalizeAnswer("Theory"), "theory");
  EXPECT_EQ(NormalizeAnswer("  "), "");
  EXPECT_EQ(NormalizeAnswer("Zoë's café"), "zoës café");
}

TEST(ScoreTest, ExactMatchAndF1) {
  EXPECT_EQ(ExactMatch("the Nobel prize", {"Nobel Prize"}), 1);
  EXPECT_EQ(ExactMatch("Nobel", {"Nobel Prize", "Prize"}), 0);
  EXPECT_DOUBLE_EQ(F1Score("Nobel", {"Nobel Prize"}), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(F1Score("Nobel", {"Nobel Prize", "Nobel"}), 1.0);
  EXPECT_DOUBLE_EQ(F1Score("x x y", {"x y y"}), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(F1Score("the", {"a"}), 1.0);
  EXPECT_DOUBLE_EQ(F1Score("the", {"cat"}), 0.0);
}

TEST(NormalizedEntropyTest, MatchesDirectSum) {
  const std::vector<double> p = {0.5, 0.25, 0.25};
  const double expected = -(0.5 * std::log(0.5) + 0.5 * std::log(0.25)) / std::log(3.0);
  EXPECT_NEAR(NormalizedEntropy(p, 3), expected, 1e-15);
  EXPECT_EQ(NormalizedEntropy(std::vector<double>{1.0}, 1), 0.0);
}

TEST(ConfidenceTest, ClosedForms) {
  EXPECT_EQ(Confidence({{0, 1, 0, 0}, {0, 0, 0, 1}, 4}), 1.0);
  EXPECT_EQ(Confidence({{0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25}, 4}), 0.0);
  EXPECT_NEAR(Confidence({{0.5, 0.5, 0, 0}, {0, 0, 0.5, 0.5}, 4}), 0.5, 1e-9);
  const double h = -(0.8 * std::log(0.8) + 2 * 0.1 * std::log(0.1)) / std::log(3.0);
  EXPECT_NEAR(ConfidenceFlat(3, 0.8, 0.8), 1.0 - h, 1e-12);
  EXPECT_NEAR(ConfidenceFlat(3, 0.8, 0.8), 0.4183, 1e-4);
  EXPECT_EQ(ConfidenceFlat(1, 1.0, 1.0), 1.0);
}

TEST(EnsembleAnswerTest, KeepsTokensSharedByTwoModels) {
  EXPECT_EQ(EnsembleAnswer({"here”", "Orientalism", "Orientalism"}), "Orientalism");
  EXPECT_EQ(EnsembleAnswer({"Orientalism", "behaviourism identities", "The discourse of Orientalism"}),
            "Orientalism");
  EXPECT_EQ(EnsembleAnswer({"Orientalism", "Determining the East as a negative", "Orientalism"}),
            "Orientalism");
  EXPECT_EQ(EnsembleAnswer({"a b", "b c", "c a"}), "a b c");
  EXPECT_EQ(EnsembleAnswer({"x x", "y", "z"}), "");
  EXPECT_EQ(EnsembleAnswer({"Paris", "paris", "Rome"}), "Paris");
}

std::vector<EvalRecord> MakeRun(TrainingAmount amount, std::vector<std::string> answers) {
  std::vector<EvalRecord> out;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    out.push_back(ScoreAnswer("q" + std::to_string(i), answers[i], {"Orientalism"}, 0.3 * (1 + static_cast<int>(amount)), amount));
  }
  return out;
}

TEST(EnsembleRecordsTest, VotesAndAveragesConfidence) {
  const auto ens = EnsembleRecords({{MakeRun(TrainingAmount::kNone, {"here", "x"}),
                                    MakeRun(TrainingAmount::kHalf, {"Orientalism", "y"}),
                                    MakeRun(TrainingAmount::kFull, {"Orientalism", "z"})}});
  ASSERT_EQ(ens.size(), 2u);
  EXPECT_EQ(ens[0].model_answer, "Orientalism");
  EXPECT_EQ(ens[0].em, 1);
  EXPECT_FALSE(ens[0].is_error);
  EXPECT_EQ(ens[0].training_amount, TrainingAmount::kEns);
  EXPECT_NEAR(ens[0].confidence, 0.6, 1e-12);
  EXPECT_TRUE(ens[1].is_error);
}

TEST(EnsembleRecordsTest, MismatchedRunsAreJoinErrors) {
  auto a = MakeRun(TrainingAmount::kNone, {"a", "b"});
  auto b = MakeRun(TrainingAmount::kHalf, {"a"});
  EXPECT_THROW(EnsembleRecords({{a, b, a}}), JoinError);
  auto c = MakeRun(TrainingAmount::kFull, {"a", "b"});
  c[1].qa_id = "other";
  EXPECT_THROW(EnsembleRecords({{a, a, c}}), JoinError);
}

TEST(EnsembleRecordsTest, FailedMemberFailsTheVote) {
  auto a = MakeRun(TrainingAmount::kNone, {"a"});
  auto b = a;
  b[0].failure = "timeout";
  const auto ens = EnsembleRecords({{a, b, a}});
  EXPECT_TRUE(ens[0].failed());
}

TEST(RecordIoTest, JsonlAndCsvRoundTrip) {
  std::vector<EvalRecord> records = MakeRun(TrainingAmount::kHalf, {"Orientalism", "b, \"c\""});
  records[1].perturbation = corpus::PerturbationMeta{corpus::PerturbationType::kChar, corpus::Amount::kFull};
  records[1].failure = "x";
  EXPECT_EQ(RecordsFromJsonl(RecordsToJsonl(records)), records);
  const std::string csv = RecordsToCsv(records);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "qa_id,training_amount,perturbation_type,perturbation_amount,em,f1,confidence,is_error,"
            "model_answer,gold_answers,failure");
  EXPECT_NE(csv.find("\"b, \"\"c\"\"\""), std::string::npos);
  try {
    RecordsFromJsonl(RecordsToJsonl(records) + "oops\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location(), 3u);
  }
}

TEST(TrainingAmountTest, NamesRoundTrip) {
  for (auto a : {TrainingAmount::kNone, TrainingAmount::kHalf, TrainingAmount::kFull,
                 TrainingAmount::kBoth, TrainingAmount::kEns}) {
    EXPECT_EQ(ParseTrainingAmount(ToString(a)), a);
  }
  EXPECT_THROW(ParseTrainingAmount("most"), ConfigError);
  EXPECT_EQ(FormatDouble(0.1), "0.1");
}

}  // namespace
}  // namespace advspan::eval
