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

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "advspan/error.h"
#include "advspan/features.h"
#include "advspan/io.h"

namespace advspan::analysis {

using nlohmann::json;

namespace {

std::string Count(std::size_t n) { return std::to_string(n); }

std::string TypeOf(const eval::EvalRecord& r) {
  return std::string(corpus::ToString(r.perturbation ? r.perturbation->type
                                                     : corpus::PerturbationType::kNone));
}

std::string XmlEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string SvgHeader(int width, int height, const Provenance& provenance) {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<metadata>" << XmlEscape(json{{"x_provenance", provenance.ToJson()}}.dump())
      << "</metadata>\n";
  return out.str();
}

Table ErrorHeatmap(std::span<const eval::EvalRecord> records) {
  Table t{"error_heatmap", {"training_amount", "perturbation_type", "errors", "total"}, {}};
  std::map<std::pair<eval::TrainingAmount, std::string>, std::pair<std::size_t, std::size_t>> cells;
  for (const auto& r : records) {
    auto& cell = cells[{r.training_amount, TypeOf(r)}];
    cell.first += r.is_error ? 1 : 0;
    ++cell.second;
  }
  for (const auto& [key, cell] : cells) {
    t.rows.push_back({std::string(eval::ToString(key.first)), key.second, Count(cell.first),
                      Count(cell.second)});
  }
  return t;
}

Table ConfidenceErrors(std::span<const eval::EvalRecord> records, double threshold) {
  Table t{"confidence_errors",
          {"training_amount", "perturbation_type", "high_confidence", "low_confidence"},
          {}};
  std::map<std::pair<eval::TrainingAmount, std::string>, std::pair<std::size_t, std::size_t>> cells;
  for (const auto& r : records) {
    auto& cell = cells[{r.training_amount, TypeOf(r)}];
    if (!r.is_error) continue;
    (r.confidence >= threshold ? cell.first : cell.second) += 1;
  }
  for (const auto& [key, cell] : cells) {
    t.rows.push_back({std::string(eval::ToString(key.first)), key.second, Count(cell.first),
                      Count(cell.second)});
  }
  return t;
}

Table AnswerLengthRatio(std::span<const eval::EvalRecord> records) {
  Table t{"answer_length_ratio", {"answer_length", "correct", "incorrect", "ratio"}, {}};
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> by_length;
  for (const auto& r : records) {
    auto& cell = by_length[TokenCount(r.model_answer)];
    (r.is_error ? cell.second : cell.first) += 1;
  }
  for (const auto& [length, cell] : by_length) {
    const std::string ratio =
        cell.second == 0 ? "inf"
                         : eval::FormatDouble(static_cast<double>(cell.first) /
                                              static_cast<double>(cell.second));
    t.rows.push_back({Count(length), Count(cell.first), Count(cell.second), ratio});
  }
  return t;
}

}  // namespace

json Provenance::ToJson() const {
  return {{"toolkit_version", toolkit_version}, {"seed", seed}, {"config_hash", config_hash}};
}

std::string Table::ToCsv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += io::CsvField(columns[i]);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += io::CsvField(row[i]);
    }
    out += '\n';
  }
  return out;
}

json Table::ToJson() const {
  json rows_json = json::array();
  for (const auto& row : rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < columns.size(); ++i) obj[columns[i]] = row[i];
    rows_json.push_back(std::move(obj));
  }
  return {{"name", name}, {"columns", columns}, {"rows", rows_json}};
}

const Table* ReportBundle::Find(std::string_view name) const {
  for (const Table& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

double Median(std::vector<double> values) {
  if (values.empty()) throw UndefinedInputError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
}

ReportBundle BuildReport(std::span<const eval::EvalRecord> all_records,
                         const corpus::Dataset* dataset, const ReportOptions& options) {
  if (options.model_bins == 0 || options.human_bins == 0 || options.context_bin_width == 0) {
    throw ConfigError("report bins must be positive");
  }
  std::vector<eval::EvalRecord> records;
  for (const auto& r : all_records) {
    if (!r.failed()) records.push_back(r);
  }

  ReportBundle bundle;
  bundle.tables.push_back(ErrorHeatmap(records));
  bundle.tables.push_back(ConfidenceErrors(records, options.confidence_threshold));
  bundle.tables.push_back(AnswerLengthRatio(records));

  Table qtype{"question_type", {"question_type", "correct", "errors"}, {}};
  Table qlen{"question_length", {"question_length", "correct", "errors"}, {}};
  Table clen{"context_length", {"bin_start", "bin_end", "correct", "errors"}, {}};
  Table readability{"readability_medians", {"group", "count", "median"}, {}};
  if (dataset) {
    const auto index = IndexContexts(*dataset);
    std::map<QuestionType, std::pair<std::size_t, std::size_t>> by_type;
    for (QuestionType q : kQuestionTypes) by_type[q];
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> by_qlen;
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> by_clen;
    std::vector<double> correct_scores;
    std::vector<double> error_scores;
    for (const auto& r : records) {
      auto it = index.find(r.qa_id);
      if (it == index.end()) throw JoinError("record id not in dataset: " + r.qa_id);
      const QaContext& c = it->second;
      auto bump = [&](std::pair<std::size_t, std::size_t>& cell) {
        (r.is_error ? cell.second : cell.first) += 1;
      };
      bump(by_type[QuestionTypeOf(c.question)]);
      bump(by_qlen[c.question_length]);
      bump(by_clen[c.context_length / options.context_bin_width]);
      (r.is_error ? error_scores : correct_scores).push_back(c.readability);
    }
    for (const auto& [q, cell] : by_type) {
      qtype.rows.push_back({std::string(ToString(q)), Count(cell.first), Count(cell.second)});
    }
    for (const auto& [len, cell] : by_qlen) {
      qlen.rows.push_back({Count(len), Count(cell.first), Count(cell.second)});
    }
    for (const auto& [bin, cell] : by_clen) {
      clen.rows.push_back({Count(bin * options.context_bin_width),
                           Count((bin + 1) * options.context_bin_width), Count(cell.first),
                           Count(cell.second)});
    }
    for (const auto& [group, scores] : {std::pair{"correct", &correct_scores},
                                        std::pair{"error", &error_scores}}) {
      readability.rows.push_back({group, Count(scores->size()),
                                  scores->empty() ? "" : eval::FormatDouble(Median(*scores))});
    }
  }
  bundle.tables.push_back(std::move(qtype));
  bundle.tables.push_back(std::move(qlen));
  bundle.tables.push_back(std::move(clen));
  bundle.tables.push_back(std::move(readability));

  Table joint{"confidence_joint", {"model_low", "model_high", "human_low", "human_high", "count"}, {}};
  std::vector<std::vector<std::size_t>> grid(options.model_bins,
                                             std::vector<std::size_t>(options.human_bins, 0));
  for (const auto& r : records) {
    if (!r.is_error || r.gold_answers.empty()) continue;
    const double m = std::clamp(r.confidence, 0.0, 1.0);
    const std::size_t mi = std::min(static_cast<std::size_t>(m * static_cast<double>(options.model_bins)),
                                    options.model_bins - 1);
    const double h = HumanAgreement(r.gold_answers);
    const double scaled = std::ceil(h * static_cast<double>(options.human_bins) - 1e-9);
    const std::size_t hi = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(scaled, 1.0)) - 1,
                                                   0, options.human_bins - 1);
    ++grid[mi][hi];
  }
  const double mb = static_cast<double>(options.model_bins);
  const double hb = static_cast<double>(options.human_bins);
  for (std::size_t i = 0; i < options.model_bins; ++i) {
    for (std::size_t j = 0; j < options.human_bins; ++j) {
      joint.rows.push_back({eval::FormatDouble(i / mb), eval::FormatDouble((i + 1) / mb),
                            eval::FormatDouble(j / hb), eval::FormatDouble((j + 1) / hb),
                            Count(grid[i][j])});
    }
  }
  bundle.tables.push_back(std::move(joint));
  return bundle;
}

std::string RenderHeatmapSvg(const Table& table, const Provenance& provenance) {
  std::vector<std::string> amounts;
  std::vector<std::string> types;
  std::map<std::pair<std::string, std::string>, std::size_t> value;
  std::size_t peak = 0;
  for (const auto& row : table.rows) {
    if (std::find(amounts.begin(), amounts.end(), row[0]) == amounts.end()) amounts.push_back(row[0]);
    if (std::find(types.begin(), types.end(), row[1]) == types.end()) types.push_back(row[1]);
    const std::size_t errors = std::stoul(row[2]);
    value[{row[0], row[1]}] = errors;
    peak = std::max(peak, errors);
  }
  constexpr int kCell = 60;
  constexpr int kLeft = 80;
  constexpr int kTop = 40;
  const int width = kLeft + kCell * static_cast<int>(std::max<std::size_t>(types.size(), 1)) + 20;
  const int height = kTop + kCell * static_cast<int>(std::max<std::size_t>(amounts.size(), 1)) + 20;
  std::ostringstream out;
  out << SvgHeader(width, height, provenance);
  out << "<text x=\"" << kLeft << "\" y=\"16\">" << XmlEscape(table.name) << "</text>\n";
  for (std::size_t c = 0; c < types.size(); ++c) {
    out << "<text x=\"" << kLeft + kCell * c + kCell / 2 << "\" y=\"" << kTop - 6
        << "\" text-anchor=\"middle\">" << XmlEscape(types[c]) << "</text>\n";
  }
  for (std::size_t r = 0; r < amounts.size(); ++r) {
    const int y = kTop + kCell * static_cast<int>(r);
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + kCell / 2
        << "\" text-anchor=\"end\">" << XmlEscape(amounts[r]) << "</text>\n";
    for (std::size_t c = 0; c < types.size(); ++c) {
      const int x = kLeft + kCell * static_cast<int>(c);
      auto it = value.find({amounts[r], types[c]});
      const std::size_t v = it == value.end() ? 0 : it->second;
      const int shade = peak ? 255 - static_cast<int>(200 * v / peak) : 255;
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\""
          << kCell << "\" fill=\"rgb(255," << shade << "," << shade << ")\" stroke=\"#999\"/>\n";
      out << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 4
          << "\" text-anchor=\"middle\">" << v << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string RenderBarSvg(const Table& table, std::size_t label_column,
                         std::size_t value_column, const Provenance& provenance) {
  std::vector<std::pair<std::string, double>> bars;
  double peak = 0.0;
  for (const auto& row : table.rows) {
    double v = 0.0;
    if (row[value_column] == "inf") {
      v = -1.0;
    } else if (!row[value_column].empty()) {
      v = std::stod(row[value_column]);
    }
    bars.emplace_back(row[label_column], v);
    peak = std::max(peak, v);
  }
  constexpr int kBar = 28;
  constexpr int kHeight = 200;
  constexpr int kTop = 30;
  const int width = 40 + kBar * static_cast<int>(std::max<std::size_t>(bars.size(), 1)) + 20;
  std::ostringstream out;
  out << SvgHeader(width, kTop + kHeight + 40, provenance);
  out << "<text x=\"40\" y=\"16\">" << XmlEscape(table.name) << ": "
      << XmlEscape(table.columns[value_column]) << "</text>\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& [label, v] = bars[i];
    const double fraction = v < 0 ? 1.0 : (peak > 0 ? v / peak : 0.0);
    const int h = static_cast<int>(std::lround(fraction * kHeight));
    const int x = 40 + kBar * static_cast<int>(i);
    out << "<rect x=\"" << x + 2 << "\" y=\"" << kTop + kHeight - h << "\" width=\"" << kBar - 4
        << "\" height=\"" << h << "\" fill=\"" << (v < 0 ? "#88a" : "#48c") << "\"/>\n";
    out << "<text x=\"" << x + kBar / 2 << "\" y=\"" << kTop + kHeight + 14
        << "\" text-anchor=\"middle\">" << XmlEscape(label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::vector<std::filesystem::path> WriteReport(const ReportBundle& bundle,
                                               const std::filesystem::path& dir,
                                               const Provenance& provenance,
                                               const ReportOptions& options) {
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::string& name, const std::string& contents) {
    const auto path = dir / name;
    io::WriteFile(path, contents);
    written.push_back(path);
  };
  json tables = json::array();
  for (const Table& t : bundle.tables) {
    write(t.name + ".csv", t.ToCsv());
    tables.push_back(t.ToJson());
  }
  json report = {{"x_provenance", provenance.ToJson()},
                 {"confidence_threshold", options.confidence_threshold},
                 {"model_bins", options.model_bins},
                 {"human_bins", options.human_bins},
                 {"context_bin_width", options.context_bin_width},
                 {"tables", tables}};
  write("report.json", report.dump(2) + "\n");
  if (const Table* t = bundle.Find("error_heatmap")) {
    write("error_heatmap.svg", RenderHeatmapSvg(*t, provenance));
  }
  if (const Table* t = bundle.Find("confidence_errors")) {
    Table labelled = *t;
    for (auto& row : labelled.rows) row[0] += "/" + row[1];
    write("confidence_errors.svg", RenderBarSvg(labelled, 0, 2, provenance));
  }
  if (const Table* t = bundle.Find("answer_length_ratio")) {
    write("answer_length_ratio.svg", RenderBarSvg(*t, 0, 3, provenance));
  }
  return written;
}

}  // namespace advspan::analysis
