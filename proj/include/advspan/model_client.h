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

#ifndef ADVSPAN_MODEL_CLIENT_H_
#define ADVSPAN_MODEL_CLIENT_H_

// Black-box span-prediction models behind an HTTP/JSON protocol.
//
//   POST /predict   {"context": str, "question": str}
//   200             {"answer": str,
//                    "tokens": [str], "start_probs": [num], "end_probs": [num]}
//                or {"answer": str, "num_tokens": int,
//                    "start_top_prob": num, "end_top_prob": num}
//
// The full form carries per-token start/end distributions; the top-only form
// carries just the probabilities of the chosen start and end tokens. A
// response may set "empty_answer": true to return "" deliberately.

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "json.hpp"

namespace advspan::model_client {

struct ModelRequest {
  std::string context;
  std::string question;
};

struct FullDistribution {
  std::vector<double> start_probs;
  std::vector<double> end_probs;
  std::vector<std::string> tokens;
};

struct TopOnlyDistribution {
  std::size_t num_tokens = 0;
  double start_top_prob = 0.0;
  double end_top_prob = 0.0;
};

using SpanDistribution = std::variant<FullDistribution, TopOnlyDistribution>;

struct ModelResponse {
  std::string answer_text;
  bool empty_answer = false;
  SpanDistribution distribution;
  std::string warning;
};

inline constexpr double kProbabilitySumTolerance = 1e-6;

// Throw ProtocolError describing the first broken invariant.
void ValidateRequest(const ModelRequest& request);
void ValidateDistribution(const SpanDistribution& distribution);
void ValidateResponse(const ModelResponse& response);

nlohmann::json RequestToJson(const ModelRequest& request);
ModelRequest RequestFromJson(const nlohmann::json& j);
nlohmann::json ResponseToJson(const ModelResponse& response);
// Parses and validates; throws ProtocolError.
ModelResponse ResponseFromJson(const nlohmann::json& j);

class Predictor {
 public:
  virtual ~Predictor() = default;
  // Must be safe to call concurrently.
  virtual ModelResponse Predict(const ModelRequest& request) = 0;
};

struct ClientOptions {
  std::chrono::milliseconds timeout{60'000};
  // Attempts after the first one.
  int retries = 3;
  // Delay before retry i (0-based) is backoff * 2^i.
  std::chrono::milliseconds backoff{100};
  std::size_t max_in_flight = 8;
};

// Talks to "http://host:port[/prefix]" and posts to "<prefix>/predict".
// Connection failures, timeouts and 5xx responses are retried; 4xx responses
// and invalid payloads raise ProtocolError immediately. Exhausted retries
// raise TransportError.
class HttpPredictor : public Predictor {
 public:
  explicit HttpPredictor(std::string endpoint, ClientOptions options = {});
  ModelResponse Predict(const ModelRequest& request) override;

  const std::string& endpoint() const { return endpoint_; }

 private:
  std::string endpoint_;
  std::string host_;
  std::string prefix_;
  ClientOptions options_;
};

// One request's outcome in a batch: a response or the error message.
struct PredictOutcome {
  std::optional<ModelResponse> response;
  std::string error;
  bool ok() const { return response.has_value(); }
};

// Runs every request with at most `max_in_flight` concurrent calls. Outcome i
// belongs to request i regardless of completion order.
std::vector<PredictOutcome> PredictAll(Predictor& predictor,
                                       std::span<const ModelRequest> requests,
                                       std::size_t max_in_flight);

// ---------------------------------------------------------------------------
// Deterministic mock model.

struct MockRule {
  // The rule fires when every keyword occurs as a token of the context.
  std::vector<std::string> keywords;
  std::string answer;
};

enum class MockShape { kFull, kTopOnly };

struct MockModelConfig {
  std::vector<MockRule> rules;
  // Probability mass placed on the predicted start and end tokens, in (0, 1].
  double sharpness = 0.9;
  MockShape shape = MockShape::kFull;
};

// {"rules": [{"keyword": str | "keywords": [str], "answer": str}],
//  "sharpness": num, "shape": "full" | "top"}. Throws ConfigError.
MockModelConfig MockConfigFromJson(const nlohmann::json& j);
nlohmann::json MockConfigToJson(const MockModelConfig& config);

// The first rule whose keywords are all present answers. Its answer is
// located as a token sequence in the context (falling back to the first
// keyword's token when absent); start and end tokens get `sharpness` mass
// and the rest is spread uniformly. Without a matching rule the first token
// is returned with a uniform distribution.
ModelResponse MockPredict(const MockModelConfig& config,
                          const ModelRequest& request);

class MockPredictor : public Predictor {
 public:
  explicit MockPredictor(MockModelConfig config) : config_(std::move(config)) {}
  ModelResponse Predict(const ModelRequest& request) override {
    return MockPredict(config_, request);
  }

 private:
  MockModelConfig config_;
};

// Serves MockPredict over the wire protocol on a background thread.
// GET /healthz answers 200 {"status": "ok", "model": "mock"}; malformed
// /predict bodies answer 400.
class MockServer {
 public:
  explicit MockServer(MockModelConfig config);
  ~MockServer();
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  // Binds to `port` on 127.0.0.1 (0 picks a free port) and starts serving.
  // Returns the bound port.
  int Start(int port = 0, const std::string& host = "127.0.0.1");
  // Blocks serving on the calling thread.
  void Listen(int port, const std::string& host = "127.0.0.1");
  void Stop();

  std::string endpoint() const;
  std::size_t request_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// "mock:<config.json>" builds an in-process MockPredictor; anything else is an
// HTTP endpoint.
std::unique_ptr<Predictor> MakePredictor(const std::string& endpoint,
                                         ClientOptions options = {});

}  // namespace advspan::model_client

#endif  // ADVSPAN_MODEL_CLIENT_H_
