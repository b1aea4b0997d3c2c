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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any fails.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "advspan/attack.h"
#include "advspan/confusables.h"
#include "advspan/corpus.h"
#include "advspan/embeddings.h"
#include "advspan/eval.h"
#include "advspan/features.h"
#include "advspan/gbdt.h"
#include "advspan/io.h"
#include "advspan/model_client.h"
#include "advspan/perturb.h"
#include "advspan/pipeline.h"
#include "advspan/rng.h"
#include "synthetic.h"
#include "workspace.h"

namespace advspan::acceptance {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

confusables::ConfusableTable SampleTable() {
  return confusables::ParseConfusables(io::ReadFile(ADVSPAN_DATA_DIR "/intentional-sample.txt"));
}

// Every remapped gold span of every variant extracts to the original text.
Outcome SpanIntegrity() {
  const auto start = Clock::now();
  const testing::SyntheticCorpus c = testing::MakeCorpus(200, 2026);
  const auto table = SampleTable();
  const auto store = testing::MakeEmbeddings(2026);
  perturb::Resources resources{&table, &store, &c.paraphrases};

  std::map<std::string, std::vector<std::string>> original;
  corpus::ForEachParagraph(c.dataset, [&](std::size_t, const corpus::Paragraph& p) {
    for (const auto& qa : p.qas) {
      for (const auto& a : qa.answers) original[qa.id].push_back(a.text);
    }
  });

  std::size_t spans = 0;
  std::size_t intact = 0;
  std::size_t variants = 0;
  for (auto type : {corpus::PerturbationType::kChar, corpus::PerturbationType::kWord,
                    corpus::PerturbationType::kPara}) {
    for (auto amount : {corpus::Amount::kNone, corpus::Amount::kHalf, corpus::Amount::kFull,
                        corpus::Amount::kBoth}) {
      const corpus::Dataset v = perturb::MakeVariant(c.dataset, {type, 0.25, 99, amount}, resources);
      ++variants;
      corpus::ForEachParagraph(v, [&](std::size_t, const corpus::Paragraph& p) {
        const std::u32string context = text::DecodeUtf8(p.context);
        for (const auto& qa : p.qas) {
          std::string id = qa.id;
          if (id.size() > 2 && id.ends_with("-p")) id.resize(id.size() - 2);
          const auto& golds = original.at(id);
          for (std::size_t i = 0; i < qa.answers.size(); ++i) {
            const auto& a = qa.answers[i];
            const std::size_t n = text::CodepointLength(golds[i]);
            ++spans;
            if (a.answer_start + n <= context.size() &&
                text::EncodeUtf8(context.substr(a.answer_start, n)) == golds[i] &&
                a.text == golds[i]) {
              ++intact;
            }
          }
        }
      });
    }
  }
  const double t = Seconds(start);
  std::ostringstream d;
  d << intact << "/" << spans << " spans intact across " << variants << " variants, " << t << " s";
  return {intact == spans && spans > 0 && t < 30.0, d.str()};
}

// Substituted-position count follows min(ceil(rate*|E|), |E|) and detection
// recovers exactly the substituted positions.
Outcome CharCountLaw() {
  const auto table = SampleTable();
  const auto alphabet = confusables::AsciiAlphabet();
  Rng rng(31337);
  std::size_t ok = 0;
  std::size_t count_bad = 0;
  std::size_t detect_bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::u32string in;
    const std::size_t length = 1 + rng.Below(120);
    for (std::size_t i = 0; i < length; ++i) in += static_cast<char32_t>(0x20 + rng.Below(0x5F));
    std::vector<text::Interval> prot;
    for (std::size_t k = rng.Below(3); k > 0; --k) {
      const std::size_t b = rng.Below(length);
      prot.push_back({b, std::min(length, b + 1 + rng.Below(10))});
    }
    const std::uint64_t permille = rng.Below(1001);
    const double rate = static_cast<double>(permille) / 1000.0;
    const std::uint64_t seed = rng.Next();

    std::size_t eligible = 0;
    for (std::size_t i = 0; i < length; ++i) {
      bool inside = false;
      for (const auto& iv : prot) inside = inside || (iv.begin <= i && i < iv.end);
      if (!inside && !table.Alternatives(in[i]).empty()) ++eligible;
    }
    const std::size_t expected = std::min<std::size_t>((permille * eligible + 999) / 1000, eligible);

    const perturb::Rewrite r = perturb::PerturbChars(text::EncodeUtf8(in), perturb::ProtectedRegions(prot),
                                                     table, rate, seed);
    const std::u32string out = text::DecodeUtf8(r.text);
    std::vector<std::size_t> changed;
    if (out.size() == in.size()) {
      for (std::size_t i = 0; i < length; ++i) {
        if (out[i] != in[i]) changed.push_back(i);
      }
    }
    std::vector<std::size_t> detected;
    for (const auto& h : confusables::DetectHomoglyphs(out, table, alphabet)) detected.push_back(h.position);
    const bool count_ok = out.size() == in.size() && changed.size() == expected;
    const bool detect_ok = detected == changed;
    count_bad += count_ok ? 0 : 1;
    detect_bad += detect_ok ? 0 : 1;
    ok += count_ok && detect_ok ? 1 : 0;
  }
  std::ostringstream d;
  d << ok << "/1000 triples exact (count mismatches " << count_bad << ", detection mismatches "
    << detect_bad << ")";
  return {ok == 1000, d.str()};
}

// Exact cosine ordering on integer vectors: compares a.b/|b| across
// candidates with int64 cross-multiplication.
struct IntCosine {
  std::int64_t dot;
  std::int64_t norm2;
};

bool Greater(const IntCosine& x, const IntCosine& y) {
  const int sx = (x.dot > 0) - (x.dot < 0);
  const int sy = (y.dot > 0) - (y.dot < 0);
  if (sx != sy) return sx > sy;
  const std::int64_t lhs = x.dot * x.dot * y.norm2;
  const std::int64_t rhs = y.dot * y.dot * x.norm2;
  return sx >= 0 ? lhs > rhs : lhs < rhs;
}

bool Equal(const IntCosine& x, const IntCosine& y) { return !Greater(x, y) && !Greater(y, x); }

Outcome NearestNeighborOracle() {
  Rng rng(4242);
  std::size_t queries = 0;
  std::size_t agree = 0;
  std::size_t ties = 0;
  constexpr std::size_t kTop = 5;
  for (int v = 0; v < 100; ++v) {
    const std::size_t size = 2 + rng.Below(999);
    const std::size_t dim = 1 + rng.Below(50);
    std::vector<std::string> words;
    std::vector<std::vector<std::int64_t>> ivec;
    std::vector<std::vector<double>> dvec;
    for (std::size_t i = 0; i < size; ++i) {
      words.push_back("w" + std::to_string(i));
      std::vector<std::int64_t> x(dim);
      std::vector<double> y(dim);
      for (std::size_t k = 0; k < dim; ++k) {
        x[k] = static_cast<std::int64_t>(rng.Below(7)) - 3;
        y[k] = static_cast<double>(x[k]);
      }
      ivec.push_back(std::move(x));
      dvec.push_back(std::move(y));
    }
    const embeddings::EmbeddingStore store(words, dvec);
    std::vector<std::int64_t> norm2(size, 0);
    for (std::size_t i = 0; i < size; ++i) {
      for (auto c : ivec[i]) norm2[i] += c * c;
    }
    for (int q = 0; q < 20; ++q) {
      const std::size_t query = rng.Below(size);
      ++queries;
      std::vector<std::size_t> expected;
      if (norm2[query] != 0) {
        std::vector<std::pair<IntCosine, std::size_t>> cand;
        for (std::size_t i = 0; i < size; ++i) {
          if (i == query || norm2[i] == 0) continue;
          std::int64_t dot = 0;
          for (std::size_t k = 0; k < dim; ++k) dot += ivec[query][k] * ivec[i][k];
          cand.push_back({{dot, norm2[i]}, i});
        }
        std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
          return Greater(a.first, b.first);
        });
        for (std::size_t i = 0; i < std::min(kTop, cand.size()); ++i) expected.push_back(cand[i].second);
        if (cand.size() > 1 && Equal(cand[0].first, cand[1].first)) ++ties;
      }
      std::vector<std::size_t> got;
      for (const auto& n : store.NearestNeighbors(words[query], kTop)) {
        got.push_back(*store.IndexOf(n.word));
      }
      embeddings::NeighborCache cache(store, 1);
      const auto one = cache.Get(words[query]);
      const bool one_ok = expected.empty() ? one.empty()
                                           : (one.size() == 1 && one[0].word == words[expected[0]]);
      agree += got == expected && one_ok ? 1 : 0;
    }
  }
  std::ostringstream d;
  d << agree << "/" << queries << " queries agree over 100 vocabularies (" << ties
    << " with tied nearest neighbors)";
  return {agree == queries, d.str()};
}

Outcome ConfidenceClosedForms() {
  bool delta_ok = true;
  bool uniform_ok = true;
  for (std::size_t n = 2; n <= 64; ++n) {
    std::vector<double> delta(n, 0.0);
    delta[n / 2] = 1.0;
    std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
    delta_ok = delta_ok && eval::Confidence({delta, delta, n}) == 1.0;
    uniform_ok = uniform_ok && eval::Confidence({uniform, uniform, n}) == 0.0;
  }
  const double half = eval::Confidence({{0.5, 0.5, 0.0, 0.0}, {0.0, 0.5, 0.5, 0.0}, 4});
  const double flat = eval::ConfidenceFlat(3, 0.8, 0.8);
  const double flat_full = eval::Confidence({{0.8, 0.1, 0.1}, {0.1, 0.1, 0.8}, 3});
  const double oracle = 1.0 - (-(0.8 * std::log(0.8) + 0.2 * std::log(0.1)) / std::log(3.0));
  const bool half_ok = std::abs(half - 0.5) <= 1e-9;
  const bool flat_ok = std::abs(flat - oracle) <= 1e-6 && std::abs(flat_full - oracle) <= 1e-6 &&
                       std::round(flat * 1e4) / 1e4 == 0.4183;
  std::ostringstream d;
  d.precision(10);
  d << "delta=1 " << (delta_ok ? "exact" : "wrong") << ", uniform=0 "
    << (uniform_ok ? "exact" : "wrong") << " for n=2..64; n=4 half-half " << half
    << "; flat n=3 p=0.8 " << flat << " vs closed form " << oracle;
  return {delta_ok && uniform_ok && half_ok && flat_ok, d.str()};
}

Outcome EnsembleTriplets() {
  const std::array<std::array<std::string, 3>, 3> triplets = {{
      {"here”", "Orientalism", "Orientalism"},
      {"Orientalism", "behaviourism identities", "The discourse of Orientalism"},
      {"Orientalism", "Determining the East as a negative", "Orientalism"},
  }};
  std::size_t ok = 0;
  std::ostringstream d;
  for (const auto& t : triplets) {
    const std::string answer = eval::EnsembleAnswer(t);
    d << "\"" << answer << "\" ";
    ok += answer == "Orientalism" && eval::ExactMatch(answer, {"Orientalism"}) == 1 ? 1 : 0;
  }
  d << "(" << ok << "/3)";
  return {ok == 3, d.str()};
}

class CountingPredictor : public model_client::Predictor {
 public:
  explicit CountingPredictor(model_client::MockModelConfig config) : inner_(std::move(config)) {}
  model_client::ModelResponse Predict(const model_client::ModelRequest& r) override {
    ++calls;
    return inner_.Predict(r);
  }
  std::atomic<std::size_t> calls{0};

 private:
  model_client::MockPredictor inner_;
};

Outcome ImportanceAttack() {
  const std::string keyword = "zephyr";
  const auto& vocab = testing::Vocabulary();
  Rng rng(777);
  std::size_t top = 0;
  std::size_t query_ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> words;
    const std::size_t n = 6 + rng.Below(30);
    for (std::size_t i = 0; i < n; ++i) words.push_back(vocab[rng.Below(vocab.size())]);
    const std::size_t answer_at = rng.Below(n);
    const std::size_t key_at = rng.Below(n + 1);
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(key_at), keyword);
    const std::size_t answer_index = answer_at < key_at ? answer_at : answer_at + 1;

    std::string context;
    std::size_t answer_start = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) context += ' ';
      if (i == answer_index) answer_start = text::CodepointLength(context);
      context += words[i];
    }
    corpus::Paragraph p;
    p.context = context;
    p.qas.push_back({"q", "Which word?", {{words[answer_index], answer_start, nlohmann::json::object()}},
                     std::nullopt, nlohmann::json::object()});

    model_client::MockModelConfig config;
    config.rules.push_back({{keyword}, words[answer_index]});
    config.sharpness = 1.0;
    CountingPredictor predictor(config);
    const attack::ImportanceResult r = attack::ImportanceScores(p, p.qas[0], predictor, 4);

    // Tokens outside the gold span, counted independently.
    const text::Interval gold{answer_start, answer_start + text::CodepointLength(words[answer_index])};
    std::size_t eligible = 0;
    for (const auto& t : text::Tokenize(text::DecodeUtf8(context))) {
      eligible += t.span.end <= gold.begin || t.span.begin >= gold.end ? 1 : 0;
    }
    query_ok += r.queries == 1 + eligible && predictor.calls.load() == 1 + eligible ? 1 : 0;

    double best = -1e300;
    std::size_t best_count = 0;
    std::string best_token;
    for (const auto& s : r.scores) {
      if (s.score > best) {
        best = s.score;
        best_count = 1;
        best_token = s.token;
      } else if (s.score == best) {
        ++best_count;
      }
    }
    const auto spec = attack::TopKConstraints(r.scores, context, 1, 0);
    const bool constraint_ok = spec.sentences.size() == 1 &&
                               spec.sentences[0].negative_constraints == std::vector<std::string>{keyword};
    top += best_count == 1 && best_token == keyword && constraint_ok ? 1 : 0;
  }
  std::ostringstream d;
  d << keyword << " unique top-1 in " << top << "/100 contexts; query count 1+|eligible| in "
    << query_ok << "/100";
  return {top >= 99 && query_ok == 100, d.str()};
}

std::vector<analysis::FeatureVector> SyntheticFeatures(std::size_t n, uint64_t seed, bool dependent) {
  Rng rng(seed);
  const std::array<eval::TrainingAmount, 4> amounts = {eval::TrainingAmount::kNone, eval::TrainingAmount::kHalf,
                                                      eval::TrainingAmount::kFull, eval::TrainingAmount::kBoth};
  const std::array<corpus::PerturbationType, 3> types = {
      corpus::PerturbationType::kChar, corpus::PerturbationType::kWord, corpus::PerturbationType::kPara};
  std::vector<analysis::FeatureVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    analysis::FeatureVector f;
    f.qa_id = "s" + std::to_string(i);
    f.training_amount = amounts[rng.Below(4)];
    f.perturbation_type = types[rng.Below(3)];
    const std::size_t qt = rng.Below(8);
    f.question_type = analysis::kQuestionTypes[qt];
    f.question_length = 4 + rng.Below(12);
    f.context_length = 40 + rng.Below(160);
    f.answer_length = 1 + rng.Below(5);
    f.readability = rng.Uniform() * 16.0 - 2.0;
    if (dependent) {
      // Errors for who/when/why/other.
      const int clean = (qt == 0 || qt == 3 || qt == 5 || qt == 7) ? 1 : 0;
      f.label = rng.Uniform() < 0.1 ? 1 - clean : clean;
    } else {
      f.label = rng.Uniform() < 0.35 ? 1 : 0;
    }
    out.push_back(f);
  }
  return out;
}

Outcome ErrorPrediction() {
  const auto start = Clock::now();
  const analysis::GbdtParams params;
  const auto dependent = analysis::Encode(SyntheticFeatures(2000, 11, true));
  const auto independent = analysis::Encode(SyntheticFeatures(2000, 12, false));
  const analysis::CvReport a = analysis::CrossValidate(dependent, params, 5, 10);
  const analysis::CvReport b = analysis::CrossValidate(independent, params, 5, 10);
  const analysis::CvReport again = analysis::CrossValidate(dependent, params, 5, 10);
  const double t = Seconds(start);
  const bool signal = a.mean >= a.majority_baseline + 0.15;
  const bool noise = std::abs(b.mean - b.majority_baseline) <= 0.05;
  const bool same = a == again && analysis::ToJson(a).dump() == analysis::ToJson(again).dump();
  std::ostringstream d;
  d.precision(4);
  d << "signal CV " << a.mean << " vs majority " << a.majority_baseline << "; noise CV " << b.mean
    << " vs majority " << b.majority_baseline << "; rerun " << (same ? "identical" : "differs") << "; "
    << t << " s";
  return {signal && noise && same && t < 60.0, d.str()};
}

Outcome Readability() {
  const double cat = analysis::FleschKincaid("The cat sat");
  const testing::SyntheticCorpus c = testing::MakeCorpus(200, 2026);
  const auto table = SampleTable();
  const auto store = testing::MakeEmbeddings(2026);
  perturb::Resources resources{&table, &store, &c.paraphrases};
  std::vector<corpus::Dataset> sets = {c.dataset};
  for (auto type : {corpus::PerturbationType::kChar, corpus::PerturbationType::kWord,
                    corpus::PerturbationType::kPara}) {
    sets.push_back(perturb::MakeVariant(c.dataset, {type, 0.25, 3, corpus::Amount::kFull}, resources));
  }
  std::size_t total = 0;
  std::size_t finite = 0;
  for (const auto& d : sets) {
    corpus::ForEachParagraph(d, [&](std::size_t, const corpus::Paragraph& p) {
      ++total;
      try {
        finite += std::isfinite(analysis::FleschKincaid(p.context)) ? 1 : 0;
      } catch (const std::exception&) {
      }
    });
  }
  std::ostringstream d;
  d.precision(6);
  d << "FK(\"The cat sat\")=" << cat << "; defined and finite on " << finite << "/" << total
    << " contexts (clean plus char/word/para variants)";
  return {std::abs(cat - (-2.62)) <= 0.01 && finite == total && total == 800, d.str()};
}

Outcome Determinism() {
  testing::Workspace ws("acceptance_determinism", 40, 21);
  model_client::MockServer server(
      model_client::MockConfigFromJson(nlohmann::json::parse(io::ReadFile(ws.root() / "mock.json"))));
  server.Start();
  const auto path = ws.WriteConfig(ws.Config("char", server.endpoint(), "out"));
  const pipeline::ExperimentConfig config = pipeline::LoadConfig(path);
  const pipeline::RunResult first = pipeline::RunPipeline(config);
  const std::string first_manifest = io::ReadFile(config.output_dir / "manifest.json");
  const pipeline::RunResult second = pipeline::RunPipeline(config);
  const std::string second_manifest = io::ReadFile(config.output_dir / "manifest.json");
  const std::size_t requests = server.request_count();
  server.Stop();

  bool same_files = first.files.size() == second.files.size();
  for (std::size_t i = 0; same_files && i < first.files.size(); ++i) {
    same_files = first.files[i].path == second.files[i].path &&
                 first.files[i].sha256 == second.files[i].sha256;
  }
  std::ostringstream d;
  d << first.files.size() << " artifacts, " << requests << " HTTP requests; runs "
    << (first.ok() && second.ok() ? "ok" : "failed: " + first.error + second.error) << "; hashes "
    << (same_files ? "identical" : "differ") << "; manifest "
    << (first_manifest == second_manifest ? "identical" : "differs");
  return {first.ok() && second.ok() && same_files && first_manifest == second_manifest &&
              !first.files.empty() && requests > 0,
          d.str()};
}

}  // namespace
}  // namespace advspan::acceptance

int main() {
  using advspan::acceptance::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"span-integrity", advspan::acceptance::SpanIntegrity},
      {"char-count-law", advspan::acceptance::CharCountLaw},
      {"nn-oracle", advspan::acceptance::NearestNeighborOracle},
      {"confidence-closed-forms", advspan::acceptance::ConfidenceClosedForms},
      {"ensemble-triplets", advspan::acceptance::EnsembleTriplets},
      {"importance-attack", advspan::acceptance::ImportanceAttack},
      {"error-prediction", advspan::acceptance::ErrorPrediction},
      {"flesch-kincaid", advspan::acceptance::Readability},
      {"determinism", advspan::acceptance::Determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
