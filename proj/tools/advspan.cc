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

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "advspan/attack.h"
#include "advspan/error.h"
#include "advspan/eval.h"
#include "advspan/features.h"
#include "advspan/gbdt.h"
#include "advspan/io.h"
#include "advspan/model_client.h"
#include "advspan/perturb.h"
#include "advspan/pipeline.h"
#include "advspan/report.h"

namespace {

namespace fs = std::filesystem;
using advspan::ConfigError;
using advspan::ProtocolError;
using nlohmann::json;
namespace analysis = advspan::analysis;
namespace attack = advspan::attack;
namespace corpus = advspan::corpus;
namespace eval = advspan::eval;
namespace io = advspan::io;
namespace model_client = advspan::model_client;
namespace perturb = advspan::perturb;
namespace pipeline = advspan::pipeline;

struct ClientFlags {
  std::string endpoint;
  std::size_t max_in_flight = 8;
  int timeout_ms = 60'000;
  int retries = 3;

  void Add(CLI::App* app) {
    app->add_option("--endpoint", endpoint, "Model URL or mock:<config.json>");
    app->add_option("--max-in-flight", max_in_flight, "Concurrent requests")->capture_default_str();
    app->add_option("--timeout-ms", timeout_ms, "Per-request timeout")->capture_default_str();
    app->add_option("--retries", retries, "Retries after the first attempt")->capture_default_str();
  }

  // Flag, then ADVSPAN_ENDPOINT.
  std::string Resolve() const {
    if (!endpoint.empty()) return endpoint;
    if (const char* env = std::getenv("ADVSPAN_ENDPOINT"); env && *env) return env;
    throw ConfigError("no endpoint: pass --endpoint or set ADVSPAN_ENDPOINT");
  }

  model_client::ClientOptions Options() const {
    model_client::ClientOptions options;
    options.timeout = std::chrono::milliseconds(timeout_ms);
    options.retries = retries;
    options.max_in_flight = max_in_flight;
    return options;
  }
};

analysis::Provenance MakeProvenance(uint64_t seed, const json& options) {
  analysis::Provenance p;
  p.seed = seed;
  p.config_hash = io::Sha256Hex(options.dump());
  return p;
}

std::vector<eval::EvalRecord> ReadRecords(const std::vector<std::string>& paths) {
  std::vector<eval::EvalRecord> records;
  for (const std::string& path : paths) {
    auto more = eval::RecordsFromJsonl(io::ReadFile(path));
    records.insert(records.end(), more.begin(), more.end());
  }
  return records;
}

void WriteRecords(const std::vector<eval::EvalRecord>& records, const std::string& out,
                  const std::string& csv) {
  io::WriteFile(out, eval::RecordsToJsonl(records));
  if (!csv.empty()) io::WriteFile(csv, eval::RecordsToCsv(records));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial robustness evaluation for span-based question answering"};
  app.set_version_flag("--version", std::string(ADVSPAN_VERSION));
  app.require_subcommand(1);

  // perturb
  auto* perturb_cmd = app.add_subcommand("perturb", "Write a perturbed variant of a dataset");
  std::string p_in, p_out, p_type = "char", p_amount = "full";
  double p_rate = perturb::kDefaultRate;
  uint64_t p_seed = 0;
  pipeline::ResourcePaths p_resources;
  std::optional<std::size_t> p_max_vocab;
  perturb_cmd->add_option("--in", p_in, "Input dataset")->required();
  perturb_cmd->add_option("--out", p_out, "Output dataset")->required();
  perturb_cmd->add_option("--type", p_type, "char, word or para")->capture_default_str();
  perturb_cmd->add_option("--amount", p_amount, "none, half, full or both")->capture_default_str();
  perturb_cmd->add_option("--rate", p_rate, "Share of eligible units")->capture_default_str();
  perturb_cmd->add_option("--seed", p_seed, "Random seed")->capture_default_str();
  perturb_cmd->add_option("--confusables", p_resources.confusables, "intentional.txt");
  perturb_cmd->add_option("--embeddings", p_resources.embeddings, "Text-format word vectors");
  perturb_cmd->add_option("--max-vocab", p_max_vocab, "Load at most N vectors");
  perturb_cmd->add_option("--paraphrases", p_resources.paraphrases, "Paraphrase sets (JSONL)");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a model on a dataset");
  std::string e_in, e_out, e_csv, e_amount = "none";
  ClientFlags e_client;
  evaluate_cmd->add_option("--in", e_in, "Dataset")->required();
  evaluate_cmd->add_option("--out", e_out, "Eval records (JSONL)")->required();
  evaluate_cmd->add_option("--csv", e_csv, "Also write CSV");
  evaluate_cmd->add_option("--amount", e_amount, "Training amount of the model")->capture_default_str();
  e_client.Add(evaluate_cmd);

  // ensemble
  auto* ensemble_cmd = app.add_subcommand("ensemble", "Vote none/half/full runs into an ens run");
  std::string en_none, en_half, en_full, en_out, en_csv;
  ensemble_cmd->add_option("--none", en_none, "Records of the none model")->required();
  ensemble_cmd->add_option("--half", en_half, "Records of the half model")->required();
  ensemble_cmd->add_option("--full", en_full, "Records of the full model")->required();
  ensemble_cmd->add_option("--out", en_out, "Ens records (JSONL)")->required();
  ensemble_cmd->add_option("--csv", en_csv, "Also write CSV");

  // importance
  auto* importance_cmd = app.add_subcommand("importance", "Leave-one-out word importance");
  std::string i_in, i_out;
  ClientFlags i_client;
  importance_cmd->add_option("--in", i_in, "Dataset")->required();
  importance_cmd->add_option("--out", i_out, "Importance results (JSONL)")->required();
  i_client.Add(importance_cmd);

  // constraints
  auto* constraints_cmd = app.add_subcommand("constraints", "Negative constraints per sentence");
  std::string c_in, c_importance, c_out;
  std::size_t c_k = attack::kDefaultConstraintCount;
  bool c_max = false;
  constraints_cmd->add_option("--in", c_in, "Dataset")->required();
  constraints_cmd->add_option("--importance", c_importance, "Importance results")->required();
  constraints_cmd->add_option("--out", c_out, "Constraint specs (JSONL)")->required();
  constraints_cmd->add_option("--k", c_k, "Constraints per QA")->capture_default_str();
  constraints_cmd->add_flag("--aggregate-max", c_max, "Pool a paragraph's QAs by maximum score");

  // apply-paraphrases
  auto* apply_cmd = app.add_subcommand("apply-paraphrases", "Ingest rewritten sentences");
  std::string a_in, a_paraphrases, a_out;
  apply_cmd->add_option("--in", a_in, "Dataset")->required();
  apply_cmd->add_option("--paraphrases", a_paraphrases, "Paraphrase sets (JSONL)")->required();
  apply_cmd->add_option("--out", a_out, "Output dataset")->required();

  // features
  auto* features_cmd = app.add_subcommand("features", "Explanatory features of eval records");
  std::vector<std::string> f_records;
  std::string f_in, f_out, f_csv;
  features_cmd->add_option("--records", f_records, "Eval record files")->required();
  features_cmd->add_option("--in", f_in, "Dataset the records were scored on")->required();
  features_cmd->add_option("--out", f_out, "Feature rows (JSONL)")->required();
  features_cmd->add_option("--csv", f_csv, "Also write CSV");

  // predict-errors
  auto* errors_cmd = app.add_subcommand("predict-errors", "Cross-validate the error model");
  std::string pe_features, pe_out;
  int pe_folds = analysis::kDefaultFolds;
  uint64_t pe_seed = 0;
  analysis::GbdtParams pe_params;
  analysis::FeatureOptions pe_options;
  errors_cmd->add_option("--features", pe_features, "Feature rows (JSONL)")->required();
  errors_cmd->add_option("--out", pe_out, "CV report (JSON)")->required();
  errors_cmd->add_option("--folds", pe_folds, "Folds")->capture_default_str();
  errors_cmd->add_option("--seed", pe_seed, "Shuffle seed")->capture_default_str();
  errors_cmd->add_option("--rounds", pe_params.rounds, "Boosting rounds")->capture_default_str();
  errors_cmd->add_option("--learning-rate", pe_params.learning_rate, "Shrinkage")->capture_default_str();
  errors_cmd->add_option("--max-depth", pe_params.max_depth, "Tree depth")->capture_default_str();
  errors_cmd->add_flag("--include-confidence", pe_options.include_confidence,
                       "Use model confidence as a feature");
  errors_cmd->add_flag("--include-human-agreement", pe_options.include_human_agreement,
                       "Use annotator agreement as a feature");

  // report
  auto* report_cmd = app.add_subcommand("report", "Summary tables and plots");
  std::vector<std::string> r_records;
  std::string r_in, r_out;
  uint64_t r_seed = 0;
  analysis::ReportOptions r_options;
  report_cmd->add_option("--records", r_records, "Eval record files")->required();
  report_cmd->add_option("--in", r_in, "Dataset the records were scored on");
  report_cmd->add_option("--out-dir", r_out, "Output directory")->required();
  report_cmd->add_option("--confidence-threshold", r_options.confidence_threshold,
                         "High-confidence cutoff")->capture_default_str();
  report_cmd->add_option("--human-bins", r_options.human_bins, "Agreement bins")->capture_default_str();
  report_cmd->add_option("--model-bins", r_options.model_bins, "Confidence bins")->capture_default_str();
  report_cmd->add_option("--seed", r_seed, "Seed recorded in the artifacts")->capture_default_str();

  // mock-serve
  auto* mock_cmd = app.add_subcommand("mock-serve", "Serve the deterministic mock model");
  std::string m_config, m_host = "127.0.0.1";
  int m_port = 8080;
  mock_cmd->add_option("--config", m_config, "Mock model config (JSON)")->required();
  mock_cmd->add_option("--port", m_port, "Port")->capture_default_str();
  mock_cmd->add_option("--host", m_host, "Bind address")->capture_default_str();

  // run
  auto* run_cmd = app.add_subcommand("run", "Run a full experiment");
  std::string run_config, run_endpoint, run_output;
  run_cmd->add_option("--config", run_config, "Experiment config (JSON)")->required();
  run_cmd->add_option("--endpoint", run_endpoint, "Endpoint for every training amount");
  run_cmd->add_option("--output-dir", run_output, "Override the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(advspan::ExitCode::kConfig);
  }

  try {
    if (*perturb_cmd) {
      p_resources.max_vocab = p_max_vocab;
      const auto type = corpus::ParsePerturbationType(p_type);
      const auto amount = corpus::ParseAmount(p_amount);
      const auto loaded = amount == corpus::Amount::kNone
                              ? pipeline::LoadedResources{}
                              : pipeline::LoadResources(p_resources, type);
      corpus::Dataset dataset = pipeline::LoadDataset(p_in);
      corpus::Dataset variant =
          perturb::MakeVariant(dataset, {type, p_rate, p_seed, amount}, loaded.view());
      const json options = {{"type", p_type}, {"amount", p_amount}, {"rate", p_rate},
                            {"seed", p_seed}};
      variant.extra["x_provenance"] = MakeProvenance(p_seed, options).ToJson();
      io::WriteFile(p_out, corpus::SerializeDataset(variant));
    } else if (*evaluate_cmd) {
      const corpus::Dataset dataset = pipeline::LoadDataset(e_in);
      auto predictor = model_client::MakePredictor(e_client.Resolve(), e_client.Options());
      const auto records = eval::EvaluateDataset(dataset, *predictor,
                                                 eval::ParseTrainingAmount(e_amount),
                                                 e_client.max_in_flight);
      WriteRecords(records, e_out, e_csv);
      std::size_t failed = 0;
      for (const auto& r : records) failed += r.failed() ? 1 : 0;
      if (failed) std::cerr << failed << " of " << records.size() << " queries failed\n";
      if (failed && failed == records.size()) {
        throw ProtocolError("every query failed: " + records.front().failure);
      }
    } else if (*ensemble_cmd) {
      const auto records = eval::EnsembleRecords(
          {ReadRecords({en_none}), ReadRecords({en_half}), ReadRecords({en_full})});
      WriteRecords(records, en_out, en_csv);
    } else if (*importance_cmd) {
      const corpus::Dataset dataset = pipeline::LoadDataset(i_in);
      auto predictor = model_client::MakePredictor(i_client.Resolve(), i_client.Options());
      std::vector<attack::ImportanceResult> results;
      corpus::ForEachParagraph(dataset, [&](std::size_t index, const corpus::Paragraph& p) {
        for (const corpus::QA& qa : p.qas) {
          auto r = attack::ImportanceScores(p, qa, *predictor, i_client.max_in_flight);
          r.paragraph_index = index;
          results.push_back(std::move(r));
        }
      });
      io::WriteFile(i_out, attack::ImportanceToJsonl(results));
    } else if (*constraints_cmd) {
      const corpus::Dataset dataset = pipeline::LoadDataset(c_in);
      const auto results = attack::ImportanceFromJsonl(io::ReadFile(c_importance));
      std::vector<std::string> contexts;
      corpus::ForEachParagraph(dataset, [&](std::size_t, const corpus::Paragraph& p) {
        contexts.push_back(p.context);
      });
      std::vector<attack::ConstraintSpec> specs;
      std::map<std::size_t, std::vector<attack::ImportanceResult>> by_paragraph;
      for (const auto& r : results) {
        if (r.paragraph_index >= contexts.size()) {
          throw advspan::JoinError("importance paragraph " + std::to_string(r.paragraph_index) +
                                   " is not in the dataset");
        }
        by_paragraph[r.paragraph_index].push_back(r);
      }
      for (const auto& [index, group] : by_paragraph) {
        if (c_max) {
          specs.push_back(attack::TopKConstraints(attack::MaxAggregate(group), contexts[index],
                                                  c_k, index));
        } else {
          for (const auto& r : group) {
            specs.push_back(attack::TopKConstraints(r.scores, contexts[index], c_k, index));
          }
        }
      }
      io::WriteFile(c_out, attack::ConstraintsToJsonl(specs));
    } else if (*apply_cmd) {
      const corpus::Dataset dataset = pipeline::LoadDataset(a_in);
      const auto sets = perturb::ParseParaphraseSets(io::ReadFile(a_paraphrases));
      io::WriteFile(a_out, corpus::SerializeDataset(attack::ApplyStrategicParaphrases(dataset, sets)));
    } else if (*features_cmd) {
      const corpus::Dataset dataset = pipeline::LoadDataset(f_in);
      const auto features = analysis::BuildFeatures(ReadRecords(f_records), dataset);
      io::WriteFile(f_out, analysis::FeaturesToJsonl(features));
      if (!f_csv.empty()) io::WriteFile(f_csv, analysis::FeaturesToCsv(features));
    } else if (*errors_cmd) {
      const auto features = analysis::FeaturesFromJsonl(io::ReadFile(pe_features));
      const auto report = analysis::CrossValidate(analysis::Encode(features, pe_options),
                                                  pe_params, pe_seed, pe_folds);
      json out = analysis::ToJson(report);
      out["x_provenance"] = MakeProvenance(pe_seed, analysis::ToJson(pe_params)).ToJson();
      io::WriteFile(pe_out, out.dump(2) + "\n");
      std::cout << "micro-F1 " << report.mean << " +/- " << report.standard_error
                << " (majority " << report.majority_baseline << ")\n";
    } else if (*report_cmd) {
      const auto records = ReadRecords(r_records);
      std::optional<corpus::Dataset> dataset;
      if (!r_in.empty()) dataset = pipeline::LoadDataset(r_in);
      const auto bundle = analysis::BuildReport(records, dataset ? &*dataset : nullptr, r_options);
      const json options = {{"confidence_threshold", r_options.confidence_threshold},
                            {"human_bins", r_options.human_bins},
                            {"model_bins", r_options.model_bins}};
      analysis::WriteReport(bundle, r_out, MakeProvenance(r_seed, options), r_options);
    } else if (*mock_cmd) {
      const auto config = model_client::MockConfigFromJson(json::parse(io::ReadFile(m_config)));
      model_client::MockServer server(config);
      std::cerr << "mock model listening on http://" << m_host << ":" << m_port << "\n";
      server.Listen(m_port, m_host);
    } else if (*run_cmd) {
      pipeline::ExperimentConfig config = pipeline::LoadConfig(run_config);
      if (const char* env = std::getenv("ADVSPAN_ENDPOINT"); env && *env) {
        pipeline::OverrideEndpoint(config, env);
      }
      if (!run_endpoint.empty()) pipeline::OverrideEndpoint(config, run_endpoint);
      if (!run_output.empty()) config.output_dir = run_output;
      const auto result = pipeline::RunPipeline(config);
      if (!result.ok()) {
        std::cerr << "stage " << result.failed_stage << " failed: " << result.error << "\n";
        return static_cast<int>(result.exit_code);
      }
      std::cout << result.files.size() << " artifacts in " << config.output_dir.string() << "\n";
    }
  } catch (const advspan::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(advspan::ExitCode::kConfig);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(advspan::ExitCode::kFailure);
  }
  return 0;
}
