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

#ifndef ADVSPAN_GBDT_H_
#define ADVSPAN_GBDT_H_

// Gradient-boosted regression trees on logistic loss with exact greedy
// split search, plus shuffled k-fold cross-validation.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "advspan/features.h"
#include "json.hpp"

namespace advspan::analysis {

struct GbdtParams {
  int rounds = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  // L2 penalty on leaf weights.
  double lambda = 1.0;
  double min_child_weight = 1.0;
  // Minimum gain for a split.
  double gamma = 0.0;

  bool operator==(const GbdtParams&) const = default;
};

struct TreeNode {
  // -1 marks a leaf.
  int feature = -1;
  // Rows with x[feature] < threshold go left.
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  double gain = 0.0;

  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;

  double Predict(std::span<const double> row) const;
  int depth() const;
  bool operator==(const Tree&) const = default;
};

class GbdtModel {
 public:
  double PredictMargin(std::span<const double> row) const;
  double PredictProbability(std::span<const double> row) const;
  // 1 when the probability exceeds 0.5.
  int PredictLabel(std::span<const double> row) const;

  const GbdtParams& params() const { return params_; }
  double base_margin() const { return base_margin_; }
  const std::vector<Tree>& trees() const { return trees_; }
  // Summed split gain per input column.
  const std::vector<double>& importance() const { return importance_; }
  double total_gain() const;

  bool operator==(const GbdtModel&) const = default;

 private:
  friend GbdtModel GbdtTrain(const std::vector<std::vector<double>>&,
                             const std::vector<int>&, const GbdtParams&);

  GbdtParams params_;
  double base_margin_ = 0.0;
  std::vector<Tree> trees_;
  std::vector<double> importance_;
};

// Deterministic given row order. Throws ValidationError with fewer than two
// rows or when only one class is present.
GbdtModel GbdtTrain(const std::vector<std::vector<double>>& rows,
                    const std::vector<int>& labels, const GbdtParams& params = {});

inline constexpr int kDefaultFolds = 10;

struct CvReport {
  int folds = kDefaultFolds;
  uint64_t seed = 0;
  GbdtParams params;
  std::size_t rows = 0;
  // Accuracy per fold; for single-label binary prediction this equals
  // micro-averaged F1.
  std::vector<double> fold_micro_f1;
  double mean = 0.0;
  double standard_error = 0.0;
  double majority_baseline = 0.0;
  std::vector<std::pair<std::string, double>> importance;
  std::vector<std::pair<std::string, double>> group_importance;

  bool operator==(const CvReport&) const = default;
};

// Shuffles with `seed`, splits into `folds` near-equal folds and scores a
// model trained on the rest for each. Importance comes from a model trained
// on all rows. Throws ValidationError with fewer rows than folds.
CvReport CrossValidate(const EncodedMatrix& data, const GbdtParams& params,
                       uint64_t seed, int folds = kDefaultFolds);

nlohmann::json ToJson(const CvReport& report);
nlohmann::json ToJson(const GbdtParams& params);

}  // namespace advspan::analysis

#endif  // ADVSPAN_GBDT_H_
