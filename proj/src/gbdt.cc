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

#include "advspan/gbdt.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "advspan/error.h"
#include "advspan/rng.h"

namespace advspan::analysis {

using nlohmann::json;

namespace {

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& rows,
              const std::vector<std::vector<std::size_t>>& sorted,
              const std::vector<double>& grad, const std::vector<double>& hess,
              const GbdtParams& params)
      : rows_(rows), sorted_(sorted), grad_(grad), hess_(hess), params_(params),
        owner_(rows.size(), -1) {}

  Tree Build() {
    std::vector<std::size_t> all(rows_.size());
    std::iota(all.begin(), all.end(), 0);
    Grow(all, 0);
    return std::move(tree_);
  }

 private:
  double Score(double g, double h) const { return g * g / (h + params_.lambda); }

  int Grow(const std::vector<std::size_t>& members, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    double g = 0.0;
    double h = 0.0;
    for (std::size_t i : members) {
      g += grad_[i];
      h += hess_[i];
    }
    Split split;
    if (depth < params_.max_depth && members.size() >= 2) split = FindSplit(members, id, g, h);
    if (split.feature < 0) {
      tree_.nodes[id].value = -g / (h + params_.lambda) * params_.learning_rate;
      return id;
    }
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t i : members) {
      (rows_[i][split.feature] < split.threshold ? left : right).push_back(i);
    }
    tree_.nodes[id].feature = split.feature;
    tree_.nodes[id].threshold = split.threshold;
    tree_.nodes[id].gain = split.gain;
    const int l = Grow(left, depth + 1);
    const int r = Grow(right, depth + 1);
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  Split FindSplit(const std::vector<std::size_t>& members, int id, double g, double h) {
    for (std::size_t i : members) owner_[i] = id;
    const double parent = Score(g, h);
    Split best;
    for (std::size_t f = 0; f < sorted_.size(); ++f) {
      double gl = 0.0;
      double hl = 0.0;
      bool have_prev = false;
      double prev = 0.0;
      for (std::size_t i : sorted_[f]) {
        if (owner_[i] != id) continue;
        const double v = rows_[i][f];
        if (have_prev && v > prev) {
          const double hr = h - hl;
          if (hl >= params_.min_child_weight && hr >= params_.min_child_weight) {
            const double gain =
                0.5 * (Score(gl, hl) + Score(g - gl, hr) - parent) - params_.gamma;
            if (gain > best.gain) {
              double threshold = prev + (v - prev) / 2.0;
              if (!(threshold > prev)) threshold = v;
              best = {static_cast<int>(f), threshold, gain};
            }
          }
        }
        gl += grad_[i];
        hl += hess_[i];
        prev = v;
        have_prev = true;
      }
    }
    return best;
  }

  const std::vector<std::vector<double>>& rows_;
  const std::vector<std::vector<std::size_t>>& sorted_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  const GbdtParams& params_;
  std::vector<int> owner_;
  Tree tree_;
};

double Accuracy(const GbdtModel* model, int constant,
                const std::vector<std::vector<double>>& rows,
                const std::vector<int>& labels, std::span<const std::size_t> indices) {
  std::size_t correct = 0;
  for (std::size_t i : indices) {
    const int predicted = model ? model->PredictLabel(rows[i]) : constant;
    if (predicted == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

}  // namespace

double Tree::Predict(std::span<const double> row) const {
  int node = 0;
  while (nodes[node].feature >= 0) {
    node = row[nodes[node].feature] < nodes[node].threshold ? nodes[node].left
                                                           : nodes[node].right;
  }
  return nodes[node].value;
}

int Tree::depth() const {
  std::vector<int> level(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes[i].feature >= 0) {
      level[nodes[i].left] = level[i] + 1;
      level[nodes[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

double GbdtModel::PredictMargin(std::span<const double> row) const {
  double margin = base_margin_;
  for (const Tree& tree : trees_) margin += tree.Predict(row);
  return margin;
}

double GbdtModel::PredictProbability(std::span<const double> row) const {
  return Sigmoid(PredictMargin(row));
}

int GbdtModel::PredictLabel(std::span<const double> row) const {
  return PredictProbability(row) > 0.5 ? 1 : 0;
}

double GbdtModel::total_gain() const {
  double total = 0.0;
  for (const Tree& tree : trees_) {
    for (const TreeNode& node : tree.nodes) {
      if (node.feature >= 0) total += node.gain;
    }
  }
  return total;
}

GbdtModel GbdtTrain(const std::vector<std::vector<double>>& rows,
                    const std::vector<int>& labels, const GbdtParams& params) {
  const std::size_t n = rows.size();
  if (labels.size() != n) throw ValidationError("row and label counts differ");
  if (n < 2) throw ValidationError("gradient boosting needs at least two rows");
  const std::size_t positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0 || positives == n) {
    throw ValidationError("degenerate model: training labels contain a single class");
  }
  const std::size_t width = rows.front().size();
  for (const auto& row : rows) {
    if (row.size() != width) throw ValidationError("ragged feature rows");
  }

  std::vector<std::vector<std::size_t>> sorted(width);
  for (std::size_t f = 0; f < width; ++f) {
    sorted[f].resize(n);
    std::iota(sorted[f].begin(), sorted[f].end(), 0);
    std::stable_sort(sorted[f].begin(), sorted[f].end(),
                     [&](std::size_t a, std::size_t b) { return rows[a][f] < rows[b][f]; });
  }

  GbdtModel model;
  model.params_ = params;
  const double prior = static_cast<double>(positives) / static_cast<double>(n);
  model.base_margin_ = std::log(prior / (1.0 - prior));
  model.importance_.assign(width, 0.0);

  std::vector<double> margin(n, model.base_margin_);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  for (int round = 0; round < params.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = Sigmoid(margin[i]);
      grad[i] = p - labels[i];
      hess[i] = p * (1.0 - p);
    }
    Tree tree = TreeBuilder(rows, sorted, grad, hess, params).Build();
    for (std::size_t i = 0; i < n; ++i) margin[i] += tree.Predict(rows[i]);
    for (const TreeNode& node : tree.nodes) {
      if (node.feature >= 0) model.importance_[node.feature] += node.gain;
    }
    model.trees_.push_back(std::move(tree));
  }
  return model;
}

CvReport CrossValidate(const EncodedMatrix& data, const GbdtParams& params,
                       uint64_t seed, int folds) {
  const std::size_t n = data.rows.size();
  if (folds < 2) throw ConfigError("cross-validation needs at least two folds");
  if (n < static_cast<std::size_t>(folds)) {
    throw ValidationError("cross-validation needs at least " + std::to_string(folds) +
                          " rows, got " + std::to_string(n));
  }
  CvReport report;
  report.folds = folds;
  report.seed = seed;
  report.params = params;
  report.rows = n;

  const std::size_t positives =
      static_cast<std::size_t>(std::count(data.labels.begin(), data.labels.end(), 1));
  report.majority_baseline =
      static_cast<double>(std::max(positives, n - positives)) / static_cast<double>(n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.Shuffle(std::span<std::size_t>(order));

  const std::size_t f = static_cast<std::size_t>(folds);
  std::size_t begin = 0;
  for (std::size_t k = 0; k < f; ++k) {
    const std::size_t size = n / f + (k < n % f ? 1 : 0);
    const std::span<const std::size_t> test(order.data() + begin, size);
    std::vector<std::vector<double>> train_rows;
    std::vector<int> train_labels;
    for (std::size_t j = 0; j < n; ++j) {
      if (j >= begin && j < begin + size) continue;
      train_rows.push_back(data.rows[order[j]]);
      train_labels.push_back(data.labels[order[j]]);
    }
    const std::size_t train_pos =
        static_cast<std::size_t>(std::count(train_labels.begin(), train_labels.end(), 1));
    if (train_pos == 0 || train_pos == train_labels.size()) {
      report.fold_micro_f1.push_back(
          Accuracy(nullptr, train_pos ? 1 : 0, data.rows, data.labels, test));
    } else {
      const GbdtModel model = GbdtTrain(train_rows, train_labels, params);
      report.fold_micro_f1.push_back(Accuracy(&model, 0, data.rows, data.labels, test));
    }
    begin += size;
  }

  const double mean = std::accumulate(report.fold_micro_f1.begin(),
                                      report.fold_micro_f1.end(), 0.0) /
                      static_cast<double>(f);
  double ss = 0.0;
  for (double s : report.fold_micro_f1) ss += (s - mean) * (s - mean);
  report.mean = mean;
  report.standard_error = std::sqrt(ss / static_cast<double>(f - 1)) / std::sqrt(static_cast<double>(f));

  if (positives != 0 && positives != n) {
    const GbdtModel full = GbdtTrain(data.rows, data.labels, params);
    std::map<std::string, double> groups;
    std::vector<std::string> group_order;
    for (std::size_t c = 0; c < data.columns.size(); ++c) {
      report.importance.emplace_back(data.columns[c], full.importance()[c]);
      const std::string& group = data.groups[c];
      if (!groups.count(group)) group_order.push_back(group);
      groups[group] += full.importance()[c];
    }
    for (const std::string& group : group_order) report.group_importance.emplace_back(group, groups[group]);
  }
  return report;
}

json ToJson(const GbdtParams& params) {
  return {{"rounds", params.rounds},
          {"learning_rate", params.learning_rate},
          {"max_depth", params.max_depth},
          {"lambda", params.lambda},
          {"min_child_weight", params.min_child_weight},
          {"gamma", params.gamma},
          {"loss", "logistic"}};
}

json ToJson(const CvReport& report) {
  json importance = json::array();
  for (const auto& [name, gain] : report.importance) {
    importance.push_back({{"feature", name}, {"gain", gain}});
  }
  json groups = json::array();
  for (const auto& [name, gain] : report.group_importance) {
    groups.push_back({{"feature", name}, {"gain", gain}});
  }
  return {{"folds", report.folds},
          {"seed", report.seed},
          {"rows", report.rows},
          {"params", ToJson(report.params)},
          {"fold_micro_f1", report.fold_micro_f1},
          {"mean_micro_f1", report.mean},
          {"stderr", report.standard_error},
          {"majority_baseline", report.majority_baseline},
          {"importance", importance},
          {"group_importance", groups}};
}

}  // namespace advspan::analysis
