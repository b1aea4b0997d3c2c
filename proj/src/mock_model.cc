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

#include <atomic>
#include <mutex>
#include <thread>

#include "advspan/error.h"
#include "advspan/model_client.h"
#include "advspan/text.h"
#include "httplib.h"

namespace advspan::model_client {

using nlohmann::json;

MockModelConfig MockConfigFromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("mock config must be a JSON object");
  MockModelConfig config;
  try {
    if (auto it = j.find("rules"); it != j.end()) {
      for (const json& r : *it) {
        MockRule rule;
        if (auto k = r.find("keywords"); k != r.end()) {
          rule.keywords = k->get<std::vector<std::string>>();
        } else if (auto k1 = r.find("keyword"); k1 != r.end()) {
          rule.keywords = {k1->get<std::string>()};
        }
        if (rule.keywords.empty()) throw ConfigError("mock rule has no keyword");
        rule.answer = r.at("answer").get<std::string>();
        config.rules.push_back(std::move(rule));
      }
    }
    config.sharpness = j.value("sharpness", config.sharpness);
    const std::string shape = j.value("shape", std::string("full"));
    if (shape == "full") {
      config.shape = MockShape::kFull;
    } else if (shape == "top") {
      config.shape = MockShape::kTopOnly;
    } else {
      throw ConfigError("unknown mock shape: " + shape);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid mock config: ") + e.what());
  }
  if (!(config.sharpness > 0.0 && config.sharpness <= 1.0)) {
    throw ConfigError("mock sharpness must lie in (0, 1]");
  }
  return config;
}

json MockConfigToJson(const MockModelConfig& config) {
  json rules = json::array();
  for (const MockRule& rule : config.rules) {
    rules.push_back({{"keywords", rule.keywords}, {"answer", rule.answer}});
  }
  return {{"rules", rules},
          {"sharpness", config.sharpness},
          {"shape", config.shape == MockShape::kFull ? "full" : "top"}};
}

namespace {

std::vector<double> Peaked(std::size_t n, std::size_t index, double sharpness) {
  if (n == 1) return {1.0};
  std::vector<double> probs(n, (1.0 - sharpness) / static_cast<double>(n - 1));
  probs[index] = sharpness;
  return probs;
}

std::optional<std::size_t> FindSequence(const std::vector<text::Token>& haystack,
                                        const std::vector<text::Token>& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return std::nullopt;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < needle.size() && match; ++j) {
      match = haystack[i + j].text == needle[j].text;
    }
    if (match) return i;
  }
  return std::nullopt;
}

}  // namespace

ModelResponse MockPredict(const MockModelConfig& config,
                          const ModelRequest& request) {
  const std::u32string context = text::DecodeUtf8(request.context);
  const std::vector<text::Token> tokens = text::Tokenize(context);

  ModelResponse response;
  FullDistribution full;
  if (tokens.empty()) {
    response.empty_answer = true;
    full.tokens = {""};
    full.start_probs = full.end_probs = {1.0};
  } else {
    for (const text::Token& token : tokens) full.tokens.push_back(text::EncodeUtf8(token.text));
    const std::size_t n = tokens.size();
    std::size_t start = 0;
    std::size_t end = 0;
    bool matched = false;
    for (const MockRule& rule : config.rules) {
      std::optional<std::size_t> anchor;
      bool all_present = true;
      for (const std::string& keyword : rule.keywords) {
        const std::u32string kw = text::DecodeUtf8(keyword);
        auto it = std::find_if(tokens.begin(), tokens.end(),
                               [&](const text::Token& t) { return t.text == kw; });
        if (it == tokens.end()) {
          all_present = false;
          break;
        }
        if (!anchor) anchor = static_cast<std::size_t>(it - tokens.begin());
      }
      if (!all_present || !anchor) continue;
      matched = true;
      const std::vector<text::Token> answer_tokens =
          text::Tokenize(text::DecodeUtf8(rule.answer));
      if (auto found = FindSequence(tokens, answer_tokens)) {
        start = *found;
        end = *found + answer_tokens.size() - 1;
        response.answer_text = text::EncodeUtf8(text::Slice(
            context, {tokens[start].span.begin, tokens[end].span.end}));
      } else {
        start = end = *anchor;
        response.answer_text = rule.answer;
      }
      break;
    }
    if (matched) {
      full.start_probs = Peaked(n, start, config.sharpness);
      full.end_probs = Peaked(n, end, config.sharpness);
    } else {
      response.answer_text = full.tokens.front();
      full.start_probs = full.end_probs =
          std::vector<double>(n, 1.0 / static_cast<double>(n));
    }
    if (response.answer_text.empty()) response.empty_answer = true;
  }

  if (config.shape == MockShape::kFull) {
    response.distribution = std::move(full);
  } else {
    TopOnlyDistribution top;
    top.num_tokens = full.tokens.size();
    top.start_top_prob = *std::max_element(full.start_probs.begin(), full.start_probs.end());
    top.end_top_prob = *std::max_element(full.end_probs.begin(), full.end_probs.end());
    response.distribution = top;
  }
  return response;
}

struct MockServer::Impl {
  explicit Impl(MockModelConfig c) : config(std::move(c)) {
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(json{{"status", "ok"}, {"model", "mock"}}.dump(),
                      "application/json");
    });
    server.Post("/predict", [this](const httplib::Request& req,
                                   httplib::Response& res) {
      ++requests;
      try {
        const ModelRequest request = RequestFromJson(json::parse(req.body));
        res.set_content(ResponseToJson(MockPredict(config, request)).dump(),
                        "application/json");
      } catch (const std::exception& e) {
        res.status = 400;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      }
    });
  }

  MockModelConfig config;
  httplib::Server server;
  std::thread thread;
  std::string host = "127.0.0.1";
  int port = 0;
  std::atomic<std::size_t> requests{0};
};

MockServer::MockServer(MockModelConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

MockServer::~MockServer() { Stop(); }

int MockServer::Start(int port, const std::string& host) {
  impl_->host = host;
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    impl_->port = port;
  } else {
    impl_->port = -1;
  }
  if (impl_->port < 0) {
    throw ConfigError("cannot bind mock server to " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void MockServer::Listen(int port, const std::string& host) {
  impl_->host = host;
  impl_->port = port;
  if (!impl_->server.listen(host, port)) {
    throw ConfigError("cannot listen on " + host + ":" + std::to_string(port));
  }
}

void MockServer::Stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string MockServer::endpoint() const {
  return "http://" + impl_->host + ":" + std::to_string(impl_->port);
}

std::size_t MockServer::request_count() const { return impl_->requests.load(); }

}  // namespace advspan::model_client
