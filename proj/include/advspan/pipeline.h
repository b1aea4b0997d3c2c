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

#ifndef ADVSPAN_PIPELINE_H_
#define ADVSPAN_PIPELINE_H_

// End-to-end experiment runs: perturbed variants, evaluation per training
// amount plus the ensemble, reports, features and the error model, described
// by a manifest of content hashes.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "advspan/confusables.h"
#include "advspan/corpus.h"
#include "advspan/embeddings.h"
#include "advspan/error.h"
#include "advspan/eval.h"
#include "advspan/gbdt.h"
#include "advspan/model_client.h"
#include "advspan/perturb.h"
#include "advspan/report.h"
#include "json.hpp"

namespace advspan::pipeline {

struct ResourcePaths {
  std::filesystem::path confusables;
  std::filesystem::path embeddings;
  std::optional<std::size_t> max_vocab;
  std::filesystem::path paraphrases;
  // Paraphrases for the test dataset; defaults to `paraphrases`.
  std::filesystem::path test_paraphrases;
};

struct AttackOptions {
  bool enabled = false;
  // Training amount whose endpoint is probed.
  eval::TrainingAmount amount = eval::TrainingAmount::kNone;
  std::size_t k = 5;
  bool aggregate_max = false;
};

struct ExperimentConfig {
  std::filesystem::path dataset;
  // Defaults to `dataset`.
  std::filesystem::path test_dataset;
  corpus::PerturbationType type = corpus::PerturbationType::kChar;
  double rate = perturb::kDefaultRate;
  uint64_t seed = 0;
  ResourcePaths resources;
  // One endpoint per training amount among none/half/full/both.
  std::map<eval::TrainingAmount, std::string> endpoints;
  std::filesystem::path output_dir;
  analysis::ReportOptions report;
  analysis::GbdtParams gbdt;
  int folds = analysis::kDefaultFolds;
  analysis::FeatureOptions features;
  AttackOptions attack;
  model_client::ClientOptions client;
};

// Relative paths resolve against `base_dir`. Throws ConfigError.
ExperimentConfig ConfigFromJson(const nlohmann::json& j,
                                const std::filesystem::path& base_dir = {});
ExperimentConfig LoadConfig(const std::filesystem::path& path);
nlohmann::json ToJson(const ExperimentConfig& config);

// Replaces every endpoint.
void OverrideEndpoint(ExperimentConfig& config, const std::string& endpoint);

// SHA-256 of the canonical config JSON without the output directory.
std::string ConfigHash(const ExperimentConfig& config);

// Checks that every input the run needs exists. Throws ConfigError.
void ValidateConfig(const ExperimentConfig& config);

struct LoadedResources {
  std::optional<confusables::ConfusableTable> confusables;
  std::optional<embeddings::EmbeddingStore> embeddings;
  std::optional<perturb::ParaphraseSets> paraphrases;

  perturb::Resources view() const;
};

// Loads only what `type` needs. `paraphrases` overrides the configured file.
LoadedResources LoadResources(const ResourcePaths& paths, corpus::PerturbationType type,
                              const std::filesystem::path& paraphrases = {});

corpus::Dataset LoadDataset(const std::filesystem::path& path);

struct ManifestEntry {
  std::string path;
  std::string sha256;
  std::size_t bytes = 0;
};

struct RunResult {
  ExitCode exit_code = ExitCode::kOk;
  nlohmann::json manifest;
  std::vector<ManifestEntry> files;
  std::string failed_stage;
  std::string error;

  bool ok() const { return exit_code == ExitCode::kOk; }
};

// Runs every stage in order and writes manifest.json, partial on failure.
// Configuration problems throw ConfigError before anything is written.
RunResult RunPipeline(const ExperimentConfig& config);

}  // namespace advspan::pipeline

#endif  // ADVSPAN_PIPELINE_H_
