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

#include "advspan/pipeline.h"

#include <algorithm>

#include "advspan/attack.h"
#include "advspan/features.h"
#include "advspan/io.h"

namespace advspan::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr eval::TrainingAmount kTrainedAmounts[] = {
    eval::TrainingAmount::kNone, eval::TrainingAmount::kHalf,
    eval::TrainingAmount::kFull, eval::TrainingAmount::kBoth};

corpus::Amount ToCorpusAmount(eval::TrainingAmount amount) {
  switch (amount) {
    case eval::TrainingAmount::kNone: return corpus::Amount::kNone;
    case eval::TrainingAmount::kHalf: return corpus::Amount::kHalf;
    case eval::TrainingAmount::kFull: return corpus::Amount::kFull;
    case eval::TrainingAmount::kBoth: return corpus::Amount::kBoth;
    case eval::TrainingAmount::kEns: break;
  }
  throw ConfigError("ens has no corpus amount");
}

fs::path Resolve(const fs::path& base, const std::string& value) {
  if (value.empty()) return {};
  fs::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::string ResolveEndpoint(const fs::path& base, const std::string& endpoint) {
  constexpr std::string_view kMock = "mock:";
  if (!std::string_view(endpoint).starts_with(kMock)) return endpoint;
  return std::string(kMock) + Resolve(base, endpoint.substr(kMock.size())).string();
}

void RequireFile(const fs::path& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " is not configured");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw ConfigError(what + " not found: " + path.string());
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path root) : root_(std::move(root)) {}

  void Write(const std::string& relative, const std::string& contents) {
    io::WriteFile(root_ / relative, contents);
    files_.push_back({relative, io::Sha256Hex(contents), contents.size()});
  }
  void Adopt(const fs::path& absolute) {
    const std::string contents = io::ReadFile(absolute);
    files_.push_back({fs::relative(absolute, root_).generic_string(), io::Sha256Hex(contents),
                      contents.size()});
  }

  std::vector<ManifestEntry> Sorted() const {
    std::vector<ManifestEntry> out = files_;
    std::sort(out.begin(), out.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
    return out;
  }
  const fs::path& root() const { return root_; }

 private:
  fs::path root_;
  std::vector<ManifestEntry> files_;
};

std::string DatasetArtifact(corpus::Dataset dataset, const analysis::Provenance& provenance) {
  dataset.extra["x_provenance"] = provenance.ToJson();
  return corpus::SerializeDataset(dataset);
}

}  // namespace

ExperimentConfig ConfigFromJson(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentConfig c;
  try {
    c.dataset = Resolve(base_dir, j.at("dataset").get<std::string>());
    c.test_dataset = Resolve(base_dir, j.value("test_dataset", std::string()));
    if (c.test_dataset.empty()) c.test_dataset = c.dataset;
    c.seed = j.value("seed", uint64_t{0});
    if (auto it = j.find("perturbation"); it != j.end()) {
      c.type = corpus::ParsePerturbationType(it->value("type", std::string("char")));
      c.rate = it->value("rate", perturb::kDefaultRate);
      c.seed = it->value("seed", c.seed);
    }
    if (auto it = j.find("resources"); it != j.end()) {
      c.resources.confusables = Resolve(base_dir, it->value("confusables", std::string()));
      c.resources.embeddings = Resolve(base_dir, it->value("embeddings", std::string()));
      if (it->contains("max_vocab")) c.resources.max_vocab = it->at("max_vocab").get<std::size_t>();
      c.resources.paraphrases = Resolve(base_dir, it->value("paraphrases", std::string()));
      c.resources.test_paraphrases =
          Resolve(base_dir, it->value("test_paraphrases", std::string()));
    }
    if (c.resources.test_paraphrases.empty()) c.resources.test_paraphrases = c.resources.paraphrases;
    if (auto it = j.find("endpoint"); it != j.end()) {
      for (auto a : kTrainedAmounts) c.endpoints[a] = ResolveEndpoint(base_dir, it->get<std::string>());
    }
    if (auto it = j.find("endpoints"); it != j.end()) {
      for (const auto& [name, value] : it->items()) {
        const auto amount = eval::ParseTrainingAmount(name);
        if (amount == eval::TrainingAmount::kEns) {
          throw ConfigError("ens is derived from none/half/full and takes no endpoint");
        }
        c.endpoints[amount] = ResolveEndpoint(base_dir, value.get<std::string>());
      }
    }
    c.output_dir = Resolve(base_dir, j.value("output_dir", std::string("out")));
    if (auto it = j.find("report"); it != j.end()) {
      c.report.confidence_threshold = it->value("confidence_threshold", c.report.confidence_threshold);
      c.report.model_bins = it->value("model_bins", c.report.model_bins);
      c.report.human_bins = it->value("human_bins", c.report.human_bins);
      c.report.context_bin_width = it->value("context_bin_width", c.report.context_bin_width);
    }
    if (auto it = j.find("error_model"); it != j.end()) {
      c.folds = it->value("folds", c.folds);
      c.gbdt.rounds = it->value("rounds", c.gbdt.rounds);
      c.gbdt.learning_rate = it->value("learning_rate", c.gbdt.learning_rate);
      c.gbdt.max_depth = it->value("max_depth", c.gbdt.max_depth);
      c.features.include_confidence = it->value("include_confidence", false);
      c.features.include_human_agreement = it->value("include_human_agreement", false);
    }
    if (auto it = j.find("attack"); it != j.end()) {
      c.attack.enabled = it->value("enabled", true);
      c.attack.amount = eval::ParseTrainingAmount(it->value("amount", std::string("none")));
      c.attack.k = it->value("k", c.attack.k);
      c.attack.aggregate_max = it->value("aggregate_max", false);
    }
    if (auto it = j.find("client"); it != j.end()) {
      c.client.timeout = std::chrono::milliseconds(it->value("timeout_ms", int64_t{60'000}));
      c.client.retries = it->value("retries", c.client.retries);
      c.client.backoff = std::chrono::milliseconds(it->value("backoff_ms", int64_t{100}));
      c.client.max_in_flight = it->value("max_in_flight", c.client.max_in_flight);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid experiment config: ") + e.what());
  }
  return c;
}

ExperimentConfig LoadConfig(const fs::path& path) {
  json j;
  try {
    j = json::parse(io::ReadFile(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return ConfigFromJson(j, path.parent_path());
}

json ToJson(const ExperimentConfig& c) {
  json endpoints = json::object();
  for (const auto& [amount, url] : c.endpoints) endpoints[std::string(eval::ToString(amount))] = url;
  json resources = {{"confusables", c.resources.confusables.generic_string()},
                    {"embeddings", c.resources.embeddings.generic_string()},
                    {"paraphrases", c.resources.paraphrases.generic_string()},
                    {"test_paraphrases", c.resources.test_paraphrases.generic_string()}};
  if (c.resources.max_vocab) resources["max_vocab"] = *c.resources.max_vocab;
  return {{"dataset", c.dataset.generic_string()},
          {"test_dataset", c.test_dataset.generic_string()},
          {"perturbation", {{"type", corpus::ToString(c.type)}, {"rate", c.rate}, {"seed", c.seed}}},
          {"seed", c.seed},
          {"resources", resources},
          {"endpoints", endpoints},
          {"output_dir", c.output_dir.generic_string()},
          {"report",
           {{"confidence_threshold", c.report.confidence_threshold},
            {"model_bins", c.report.model_bins},
            {"human_bins", c.report.human_bins},
            {"context_bin_width", c.report.context_bin_width}}},
          {"error_model",
           {{"folds", c.folds},
            {"rounds", c.gbdt.rounds},
            {"learning_rate", c.gbdt.learning_rate},
            {"max_depth", c.gbdt.max_depth},
            {"include_confidence", c.features.include_confidence},
            {"include_human_agreement", c.features.include_human_agreement}}},
          {"attack",
           {{"enabled", c.attack.enabled},
            {"amount", eval::ToString(c.attack.amount)},
            {"k", c.attack.k},
            {"aggregate_max", c.attack.aggregate_max}}}};
}

void OverrideEndpoint(ExperimentConfig& config, const std::string& endpoint) {
  for (auto a : kTrainedAmounts) config.endpoints[a] = endpoint;
}

std::string ConfigHash(const ExperimentConfig& config) {
  json j = ToJson(config);
  j.erase("output_dir");
  return io::Sha256Hex(j.dump());
}

void ValidateConfig(const ExperimentConfig& c) {
  RequireFile(c.dataset, "dataset");
  RequireFile(c.test_dataset, "test dataset");
  switch (c.type) {
    case corpus::PerturbationType::kNone:
      throw ConfigError("an experiment needs a perturbation type other than none");
    case corpus::PerturbationType::kChar:
      RequireFile(c.resources.confusables, "confusables file");
      break;
    case corpus::PerturbationType::kWord:
      RequireFile(c.resources.embeddings, "embeddings file");
      break;
    case corpus::PerturbationType::kPara:
      RequireFile(c.resources.paraphrases, "paraphrases file");
      RequireFile(c.resources.test_paraphrases, "test paraphrases file");
      break;
  }
  if (!(c.rate >= 0.0 && c.rate <= 1.0)) throw ConfigError("perturbation rate must lie in [0, 1]");
  for (auto a : kTrainedAmounts) {
    auto it = c.endpoints.find(a);
    if (it == c.endpoints.end() || it->second.empty()) {
      throw ConfigError("no endpoint for training amount " + std::string(eval::ToString(a)));
    }
    if (it->second.starts_with("mock:")) {
      RequireFile(it->second.substr(5), "mock model config");
    } else if (!it->second.starts_with("http://")) {
      throw ConfigError("endpoint must be http://host:port or mock:<file>: " + it->second);
    }
  }
  if (c.output_dir.empty()) throw ConfigError("output_dir is not configured");
  if (c.folds < 2) throw ConfigError("error_model.folds must be at least 2");
  if (c.attack.enabled && c.attack.amount == eval::TrainingAmount::kEns) {
    throw ConfigError("the attack needs a concrete model, not ens");
  }
  if (c.attack.k == 0) throw ConfigError("attack.k must be at least 1");
}

perturb::Resources LoadedResources::view() const {
  perturb::Resources r;
  if (confusables) r.confusables = &*confusables;
  if (embeddings) r.embeddings = &*embeddings;
  if (paraphrases) r.paraphrases = &*paraphrases;
  return r;
}

LoadedResources LoadResources(const ResourcePaths& paths, corpus::PerturbationType type,
                              const fs::path& paraphrases) {
  LoadedResources loaded;
  switch (type) {
    case corpus::PerturbationType::kNone:
      break;
    case corpus::PerturbationType::kChar:
      RequireFile(paths.confusables, "confusables file");
      loaded.confusables = confusables::ParseConfusables(io::ReadFile(paths.confusables));
      break;
    case corpus::PerturbationType::kWord:
      RequireFile(paths.embeddings, "embeddings file");
      loaded.embeddings =
          embeddings::LoadEmbeddings(io::ReadFile(paths.embeddings), paths.max_vocab);
      break;
    case corpus::PerturbationType::kPara: {
      const fs::path file = paraphrases.empty() ? paths.paraphrases : paraphrases;
      RequireFile(file, "paraphrases file");
      loaded.paraphrases = perturb::ParseParaphraseSets(io::ReadFile(file));
      break;
    }
  }
  return loaded;
}

corpus::Dataset LoadDataset(const fs::path& path) {
  RequireFile(path, "dataset");
  return corpus::ParseDataset(io::ReadFile(path));
}

RunResult RunPipeline(const ExperimentConfig& config) {
  ValidateConfig(config);

  analysis::Provenance provenance;
  provenance.seed = config.seed;
  provenance.config_hash = ConfigHash(config);
  ArtifactWriter out(config.output_dir);
  std::error_code ec;
  fs::remove(config.output_dir / "manifest.json", ec);

  RunResult result;
  std::string stage = "load";
  try {
    const corpus::Dataset train = LoadDataset(config.dataset);
    const corpus::Dataset test = LoadDataset(config.test_dataset);
    const LoadedResources train_resources = LoadResources(config.resources, config.type);
    const LoadedResources test_resources =
        LoadResources(config.resources, config.type, config.resources.test_paraphrases);

    stage = "variants";
    for (auto a : kTrainedAmounts) {
      perturb::PerturbationSpec spec{config.type, config.rate, config.seed, ToCorpusAmount(a)};
      out.Write("variants/train-" + std::string(eval::ToString(a)) + ".json",
                DatasetArtifact(perturb::MakeVariant(train, spec, train_resources.view()),
                                provenance));
    }
    const corpus::Dataset test_full = perturb::MakeVariant(
        test, {config.type, config.rate, config.seed, corpus::Amount::kFull},
        test_resources.view());
    out.Write("variants/test-full.json", DatasetArtifact(test_full, provenance));

    stage = "eval";
    std::map<eval::TrainingAmount, std::vector<eval::EvalRecord>> runs;
    for (auto a : kTrainedAmounts) {
      auto predictor = model_client::MakePredictor(config.endpoints.at(a), config.client);
      runs[a] = eval::EvaluateDataset(test_full, *predictor, a, config.client.max_in_flight);
      const auto& records = runs[a];
      if (!records.empty() &&
          std::all_of(records.begin(), records.end(), [](const auto& r) { return r.failed(); })) {
        throw ProtocolError("every query to the " + std::string(eval::ToString(a)) +
                            " endpoint failed: " + records.front().failure);
      }
    }
    runs[eval::TrainingAmount::kEns] = eval::EnsembleRecords(
        {runs[eval::TrainingAmount::kNone], runs[eval::TrainingAmount::kHalf],
         runs[eval::TrainingAmount::kFull]});
    std::vector<eval::EvalRecord> all;
    for (const auto& [amount, records] : runs) {
      const std::string name = "eval/" + std::string(eval::ToString(amount));
      out.Write(name + ".jsonl", eval::RecordsToJsonl(records));
      out.Write(name + ".csv", eval::RecordsToCsv(records));
      all.insert(all.end(), records.begin(), records.end());
    }

    stage = "reports";
    const analysis::ReportBundle bundle = analysis::BuildReport(all, &test_full, config.report);
    for (const fs::path& p :
         analysis::WriteReport(bundle, config.output_dir / "reports", provenance, config.report)) {
      out.Adopt(p);
    }

    stage = "features";
    std::vector<eval::EvalRecord> trained;
    for (auto a : kTrainedAmounts) trained.insert(trained.end(), runs[a].begin(), runs[a].end());
    const auto features = analysis::BuildFeatures(trained, test_full);
    out.Write("features/features.jsonl", analysis::FeaturesToJsonl(features));
    out.Write("features/features.csv", analysis::FeaturesToCsv(features));

    stage = "errmodel";
    const analysis::EncodedMatrix matrix = analysis::Encode(features, config.features);
    analysis::CvReport cv = analysis::CrossValidate(matrix, config.gbdt, config.seed, config.folds);
    json cv_json = analysis::ToJson(cv);
    cv_json["x_provenance"] = provenance.ToJson();
    out.Write("errmodel/cv_report.json", cv_json.dump(2) + "\n");

    if (config.attack.enabled) {
      stage = "attack";
      auto predictor = model_client::MakePredictor(config.endpoints.at(config.attack.amount),
                                                   config.client);
      std::vector<attack::ImportanceResult> results;
      std::vector<attack::ConstraintSpec> specs;
      corpus::ForEachParagraph(test, [&](std::size_t index, const corpus::Paragraph& p) {
        std::vector<attack::ImportanceResult> per_paragraph;
        for (const corpus::QA& qa : p.qas) {
          attack::ImportanceResult r =
              attack::ImportanceScores(p, qa, *predictor, config.client.max_in_flight);
          r.paragraph_index = index;
          per_paragraph.push_back(r);
          results.push_back(std::move(r));
        }
        if (config.attack.aggregate_max) {
          specs.push_back(attack::TopKConstraints(attack::MaxAggregate(per_paragraph), p.context,
                                                  config.attack.k, index));
        } else {
          for (const auto& r : per_paragraph) {
            specs.push_back(attack::TopKConstraints(r.scores, p.context, config.attack.k, index));
          }
        }
      });
      out.Write("attack/importance.jsonl", attack::ImportanceToJsonl(results));
      out.Write("attack/constraints.jsonl", attack::ConstraintsToJsonl(specs));
    }
    stage.clear();
  } catch (const Error& e) {
    result.exit_code = e.exit_code();
    result.error = e.what();
  } catch (const std::exception& e) {
    result.exit_code = ExitCode::kFailure;
    result.error = e.what();
  }
  result.failed_stage = result.ok() ? "" : stage;

  result.files = out.Sorted();
  json files = json::array();
  for (const ManifestEntry& f : result.files) {
    files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  json inputs = json::array();
  auto add_input = [&](const std::string& role, const fs::path& path) {
    if (path.empty()) return;
    std::error_code exists_ec;
    if (!fs::is_regular_file(path, exists_ec)) return;
    inputs.push_back({{"role", role}, {"sha256", io::Sha256Hex(io::ReadFile(path))}});
  };
  add_input("dataset", config.dataset);
  add_input("test_dataset", config.test_dataset);
  add_input("confusables", config.resources.confusables);
  add_input("embeddings", config.resources.embeddings);
  add_input("paraphrases", config.resources.paraphrases);
  add_input("test_paraphrases", config.resources.test_paraphrases);

  result.manifest = {{"x_provenance", provenance.ToJson()},
                     {"status", result.ok() ? "ok" : "failed"},
                     {"inputs", inputs},
                     {"files", files}};
  if (!result.ok()) {
    result.manifest["failure"] = {{"stage", result.failed_stage},
                                  {"error", result.error},
                                  {"exit_code", static_cast<int>(result.exit_code)}};
  }
  io::WriteFile(config.output_dir / "manifest.json", result.manifest.dump(2) + "\n");
  return result;
}

}  // namespace advspan::pipeline
