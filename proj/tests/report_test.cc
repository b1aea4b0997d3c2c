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

#include "advspan/report.h"

#include <gtest/gtest.h>

#include <filesystem>

#include "advspan/error.h"
#include "advspan/io.h"
#include "synthetic.h"

namespace advspan::analysis {
namespace {

using eval::EvalRecord;
using eval::TrainingAmount;

EvalRecord Rec(std::string id, std::string answer, std::vector<std::string> golds, double conf,
               TrainingAmount amount, corpus::PerturbationType type) {
  EvalRecord r = eval::ScoreAnswer(std::move(id), std::move(answer), std::move(golds), conf, amount);
  r.perturbation = corpus::PerturbationMeta{type, corpus::Amount::kFull};
  return r;
}

std::vector<EvalRecord> Sample() {
  using corpus::PerturbationType;
  return {Rec("1", "x", {"x"}, 0.9, TrainingAmount::kNone, PerturbationType::kChar),
          Rec("2", "y", {"x"}, 0.9, TrainingAmount::kNone, PerturbationType::kChar),
          Rec("3", "y z", {"x", "x", "w"}, 0.2, TrainingAmount::kNone, PerturbationType::kChar),
          Rec("4", "x", {"x"}, 0.5, TrainingAmount::kFull, PerturbationType::kWord),
          Rec("5", "q", {"x", "w"}, 0.05, TrainingAmount::kFull, PerturbationType::kWord)};
}

TEST(BuildReportTest, ErrorAndConfidenceTables) {
  auto records = Sample();
  records.push_back(records[0]);
  records.back().failure = "down";
  const ReportBundle b = BuildReport(records, nullptr);
  const Table* heat = b.Find("error_heatmap");
  ASSERT_NE(heat, nullptr);
  EXPECT_EQ(heat->rows, (std::vector<std::vector<std::string>>{{"none", "char", "2", "3"},
                                                                {"full", "word", "1", "2"}}));
  const Table* conf = b.Find("confidence_errors");
  EXPECT_EQ(conf->rows, (std::vector<std::vector<std::string>>{{"none", "char", "1", "1"},
                                                                {"full", "word", "0", "1"}}));
  const Table* len = b.Find("answer_length_ratio");
  EXPECT_EQ(len->rows, (std::vector<std::vector<std::string>>{{"1", "2", "2", "1"},
                                                               {"2", "0", "1", "0"}}));
  EXPECT_TRUE(b.Find("question_type")->rows.empty());
}

TEST(BuildReportTest, JointHistogramBins) {
  const ReportBundle b = BuildReport(Sample(), nullptr);
  const Table* joint = b.Find("confidence_joint");
  ASSERT_EQ(joint->rows.size(), 60u);
  // Errors: (0.9, agreement 1) -> model 9, human 5; (0.2, 2/3) -> 2, 3;
  // (0.05, 1/2) -> 0, 2.
  std::size_t total = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      const auto& row = joint->rows[i * 6 + j];
      const bool hit = (i == 9 && j == 5) || (i == 2 && j == 3) || (i == 0 && j == 2);
      EXPECT_EQ(row[4], hit ? "1" : "0") << i << "," << j;
      total += std::stoul(row[4]);
    }
  }
  EXPECT_EQ(total, 3u);
}

TEST(BuildReportTest, DatasetTables) {
  const auto corpus = testing::MakeCorpus(10, 8);
  std::vector<EvalRecord> records;
  std::size_t k = 0;
  corpus::ForEachParagraph(corpus.dataset, [&](std::size_t, const corpus::Paragraph& p) {
    for (const corpus::QA& qa : p.qas) {
      records.push_back(Rec(qa.id, k++ % 3 ? qa.answers[0].text : "wrong", {qa.answers[0].text},
                            0.6, TrainingAmount::kHalf, corpus::PerturbationType::kChar));
    }
  });
  const ReportBundle b = BuildReport(records, &corpus.dataset);
  std::size_t correct = 0;
  std::size_t errors = 0;
  for (const auto& row : b.Find("question_type")->rows) {
    correct += std::stoul(row[1]);
    errors += std::stoul(row[2]);
  }
  EXPECT_EQ(b.Find("question_type")->rows.size(), 8u);
  EXPECT_EQ(correct + errors, records.size());
  EXPECT_EQ(errors, (records.size() + 2) / 3);
  const auto& med = b.Find("readability_medians")->rows;
  EXPECT_EQ(med[1][1], std::to_string(errors));
  EXPECT_FALSE(med[1][2].empty());
}

TEST(MedianTest, OddEvenAndEmpty) {
  EXPECT_DOUBLE_EQ(Median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(Median({4, 1, 2, 3}), 2.5);
  EXPECT_THROW(Median({}), std::exception);
}

TEST(WriteReportTest, WritesFilesWithProvenance) {
  const auto dir = std::filesystem::temp_directory_path() / "advspan_report_test";
  std::filesystem::remove_all(dir);
  const Provenance prov{ADVSPAN_VERSION, 42, "abc"};
  const auto paths = WriteReport(BuildReport(Sample(), nullptr), dir, prov);
  EXPECT_EQ(paths.size(), 8u + 1u + 3u);
  const auto report = nlohmann::json::parse(io::ReadFile(dir / "report.json"));
  EXPECT_EQ(report.at("x_provenance").at("seed"), 42);
  bool saw_svg = false;
  for (const auto& p : paths) {
    ASSERT_TRUE(std::filesystem::exists(p));
    if (p.extension() == ".svg") {
      saw_svg = true;
      EXPECT_NE(io::ReadFile(p).find("abc"), std::string::npos);
    }
  }
  EXPECT_TRUE(saw_svg);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace advspan::analysis
