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

#include "advspan/model_client.h"

#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "advspan/error.h"
#include "advspan/io.h"
#include "httplib.h"

namespace advspan::model_client {

using nlohmann::json;

namespace {

void CheckProbabilities(const std::vector<double>& probs, const char* name,
                        std::size_t expected) {
  if (probs.size() != expected) {
    throw ProtocolError(std::string(name) + " has " + std::to_string(probs.size()) +
                        " entries for " + std::to_string(expected) + " tokens");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw ProtocolError(std::string(name) + " contains an invalid probability");
    }
    sum += p;
  }
  if (std::fabs(sum - 1.0) > kProbabilitySumTolerance) {
    throw ProtocolError(std::string(name) + " sums to " + std::to_string(sum));
  }
}

void CheckTopProbability(double p, const char* name) {
  if (!std::isfinite(p) || p <= 0.0 || p > 1.0) {
    throw ProtocolError(std::string(name) + " must lie in (0, 1]");
  }
}

template <typename T>
T Field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ProtocolError(std::string("missing \"") + key + "\"");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ProtocolError(std::string("\"") + key + "\" has the wrong type");
  }
}

}  // namespace

void ValidateRequest(const ModelRequest& request) {
  if (request.context.empty()) throw ProtocolError("request context is empty");
  if (request.question.empty()) throw ProtocolError("request question is empty");
}

void ValidateDistribution(const SpanDistribution& distribution) {
  if (const auto* full = std::get_if<FullDistribution>(&distribution)) {
    if (full->tokens.empty()) throw ProtocolError("distribution has no tokens");
    CheckProbabilities(full->start_probs, "start_probs", full->tokens.size());
    CheckProbabilities(full->end_probs, "end_probs", full->tokens.size());
    return;
  }
  const auto& top = std::get<TopOnlyDistribution>(distribution);
  if (top.num_tokens < 1) throw ProtocolError("num_tokens must be positive");
  CheckTopProbability(top.start_top_prob, "start_top_prob");
  CheckTopProbability(top.end_top_prob, "end_top_prob");
}

void ValidateResponse(const ModelResponse& response) {
  if (response.answer_text.empty() && !response.empty_answer) {
    throw ProtocolError("empty answer without the empty_answer flag");
  }
  ValidateDistribution(response.distribution);
}

json RequestToJson(const ModelRequest& request) {
  return {{"context", request.context}, {"question", request.question}};
}

ModelRequest RequestFromJson(const json& j) {
  if (!j.is_object()) throw ProtocolError("request is not a JSON object");
  ModelRequest request{Field<std::string>(j, "context"),
                       Field<std::string>(j, "question")};
  ValidateRequest(request);
  return request;
}

json ResponseToJson(const ModelResponse& response) {
  json j = {{"answer", response.answer_text}};
  if (response.empty_answer) j["empty_answer"] = true;
  if (!response.warning.empty()) j["warning"] = response.warning;
  if (const auto* full = std::get_if<FullDistribution>(&response.distribution)) {
    j["tokens"] = full->tokens;
    j["start_probs"] = full->start_probs;
    j["end_probs"] = full->end_probs;
  } else {
    const auto& top = std::get<TopOnlyDistribution>(response.distribution);
    j["num_tokens"] = top.num_tokens;
    j["start_top_prob"] = top.start_top_prob;
    j["end_top_prob"] = top.end_top_prob;
  }
  return j;
}

ModelResponse ResponseFromJson(const json& j) {
  if (!j.is_object()) throw ProtocolError("response is not a JSON object");
  ModelResponse response;
  response.answer_text = Field<std::string>(j, "answer");
  if (auto it = j.find("empty_answer"); it != j.end()) {
    response.empty_answer = it->is_boolean() && it->get<bool>();
  }
  if (auto it = j.find("warning"); it != j.end() && it->is_string()) {
    response.warning = it->get<std::string>();
  }
  if (j.contains("start_probs") || j.contains("end_probs") || j.contains("tokens")) {
    FullDistribution full;
    full.tokens = Field<std::vector<std::string>>(j, "tokens");
    full.start_probs = Field<std::vector<double>>(j, "start_probs");
    full.end_probs = Field<std::vector<double>>(j, "end_probs");
    response.distribution = std::move(full);
  } else {
    TopOnlyDistribution top;
    const auto n = Field<int64_t>(j, "num_tokens");
    if (n < 1) throw ProtocolError("num_tokens must be positive");
    top.num_tokens = static_cast<std::size_t>(n);
    top.start_top_prob = Field<double>(j, "start_top_prob");
    top.end_top_prob = Field<double>(j, "end_top_prob");
    response.distribution = top;
  }
  ValidateResponse(response);
  return response;
}

HttpPredictor::HttpPredictor(std::string endpoint, ClientOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {
  constexpr std::string_view kScheme = "http://";
  if (!std::string_view(endpoint_).starts_with(kScheme)) {
    throw ConfigError("endpoint must start with http://: " + endpoint_);
  }
  const std::size_t slash = endpoint_.find('/', kScheme.size());
  host_ = endpoint_.substr(0, slash);
  if (slash != std::string::npos) prefix_ = endpoint_.substr(slash);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  if (prefix_.ends_with("/predict")) prefix_.resize(prefix_.size() - 8);
}

ModelResponse HttpPredictor::Predict(const ModelRequest& request) {
  ValidateRequest(request);
  const std::string body = RequestToJson(request).dump();
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      options_.timeout - seconds);

  std::string last_error;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(options_.backoff * (1 << (attempt - 1)));
    }
    httplib::Client client(host_);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    auto result = client.Post(prefix_ + "/predict", body, "application/json");
    if (!result) {
      last_error = httplib::to_string(result.error());
      continue;
    }
    if (result->status >= 500) {
      last_error = "HTTP " + std::to_string(result->status);
      continue;
    }
    if (result->status != 200) {
      throw ProtocolError("HTTP " + std::to_string(result->status) + ": " +
                          result->body);
    }
    json payload;
    try {
      payload = json::parse(result->body);
    } catch (const json::parse_error& e) {
      throw ProtocolError(std::string("malformed response JSON: ") + e.what());
    }
    return ResponseFromJson(payload);
  }
  throw TransportError("endpoint " + endpoint_ + " unreachable after " +
                       std::to_string(options_.retries + 1) +
                       " attempts: " + last_error);
}

std::vector<PredictOutcome> PredictAll(Predictor& predictor,
                                       std::span<const ModelRequest> requests,
                                       std::size_t max_in_flight) {
  std::vector<PredictOutcome> outcomes(requests.size());
  auto run_one = [&](std::size_t i) {
    try {
      outcomes[i].response = predictor.Predict(requests[i]);
    } catch (const std::exception& e) {
      outcomes[i].error = e.what();
    }
  };
  const std::size_t workers = std::min(std::max<std::size_t>(max_in_flight, 1),
                                       requests.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < requests.size(); ++i) run_one(i);
    return outcomes;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < requests.size(); i = next++) run_one(i);
    });
  }
  pool.clear();
  return outcomes;
}

std::unique_ptr<Predictor> MakePredictor(const std::string& endpoint,
                                         ClientOptions options) {
  constexpr std::string_view kMock = "mock:";
  if (std::string_view(endpoint).starts_with(kMock)) {
    const std::string path = endpoint.substr(kMock.size());
    json config;
    try {
      config = json::parse(io::ReadFile(path));
    } catch (const json::parse_error& e) {
      throw ConfigError("mock config " + path + ": " + e.what());
    }
    return std::make_unique<MockPredictor>(MockConfigFromJson(config));
  }
  return std::make_unique<HttpPredictor>(endpoint, options);
}

}  // namespace advspan::model_client
