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

#ifndef ADVSPAN_REPORT_H_
#define ADVSPAN_REPORT_H_

// Summary tables over evaluation records, written as CSV, JSON and SVG.
//
//   error_heatmap        training_amount, perturbation_type, errors, total
//   confidence_errors    training_amount, perturbation_type, high_confidence,
//                        low_confidence
//   answer_length_ratio  answer_length, correct, incorrect, ratio
//   question_type        question_type, correct, errors
//   question_length      question_length, correct, errors
//   context_length       bin_start, bin_end, correct, errors
//   readability_medians  group, count, median
//   confidence_joint     model_low, model_high, human_low, human_high, count
//
// Answer length counts tokens of the model answer. The ratio column is
// correct/incorrect, "inf" when a length has no incorrect answers. The joint
// histogram covers incorrect answers only, with model confidence bins
// [i/m, (i+1)/m) and human agreement bins (j/h, (j+1)/h].

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "advspan/corpus.h"
#include "advspan/eval.h"
#include "json.hpp"

namespace advspan::analysis {

struct Provenance {
  std::string toolkit_version = ADVSPAN_VERSION;
  uint64_t seed = 0;
  std::string config_hash;

  nlohmann::json ToJson() const;
};

struct ReportOptions {
  double confidence_threshold = 0.5;
  std::size_t model_bins = 10;
  std::size_t human_bins = 6;
  std::size_t context_bin_width = 25;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string ToCsv() const;
  nlohmann::json ToJson() const;
};

struct ReportBundle {
  std::vector<Table> tables;

  const Table* Find(std::string_view name) const;
};

// Failed records are excluded. Tables that need question or context text are
// emitted header-only when `dataset` is null.
ReportBundle BuildReport(std::span<const eval::EvalRecord> records,
                         const corpus::Dataset* dataset,
                         const ReportOptions& options = {});

// Writes <name>.csv per table, report.json, and SVG renderings of the
// heatmap, confidence and answer-length tables. Returns the written paths.
std::vector<std::filesystem::path> WriteReport(const ReportBundle& bundle,
                                               const std::filesystem::path& dir,
                                               const Provenance& provenance,
                                               const ReportOptions& options = {});

std::string RenderHeatmapSvg(const Table& table, const Provenance& provenance);
std::string RenderBarSvg(const Table& table, std::size_t label_column,
                         std::size_t value_column, const Provenance& provenance);

double Median(std::vector<double> values);

}  // namespace advspan::analysis

#endif  // ADVSPAN_REPORT_H_
