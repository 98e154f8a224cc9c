// Copyright 2026 The hrt Authors
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

#include "hrt/curation/chat_client.hpp"

#include <algorithm>
#include <cmath>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <thread>

#include "hrt/answer.hpp"
#include "hrt/errors.hpp"

namespace hrt {

std::chrono::milliseconds RetryPolicy::backoff(int retry) const {
  const double ms = static_cast<double>(initial_backoff.count()) *
                    std::pow(multiplier, static_cast<double>(std::max(retry, 1) - 1));
  return std::min(max_backoff, std::chrono::milliseconds(static_cast<long long>(ms)));
}

ChatClient::ChatClient(ChatClientOptions options, Sleeper sleep)
    : options_(std::move(options)), sleep_(std::move(sleep)) {
  constexpr std::string_view scheme = "http://";
  const std::string& url = options_.endpoint;
  if (url.rfind(scheme, 0) != 0) {
    throw ContractError("chat endpoint must start with http:// (got '" + url + "')");
  }
  const auto slash = url.find('/', scheme.size());
  origin_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
  if (origin_.size() == scheme.size()) throw ContractError("chat endpoint has no host");
  if (options_.retry.max_attempts < 1) throw ContractError("max_attempts must be >= 1");
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

ChatReply ChatClient::complete(const std::vector<ChatMessage>& messages) const {
  nlohmann::ordered_json body;
  body["model"] = options_.model;
  body["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  body["temperature"] = options_.temperature;
  body["max_tokens"] = options_.max_tokens;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  std::string last_error;
  for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
    if (attempt > 1) sleep_(options_.retry.backoff(attempt - 1));
    httplib::Client client(origin_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw IoError("chat endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    try {
      const auto j = nlohmann::json::parse(res->body);
      const auto& choice = j.at("choices").at(0);
      ChatReply reply;
      reply.content = choice.at("message").at("content").get<std::string>();
      if (choice.contains("finish_reason") && choice.at("finish_reason").is_string()) {
        reply.finish_reason = choice.at("finish_reason").get<std::string>();
      }
      reply.attempts = attempt;
      return reply;
    } catch (const nlohmann::json::exception& e) {
      throw IoError(std::string("malformed chat response: ") + e.what());
    }
  }
  throw IoError("chat request failed after " + std::to_string(options_.retry.max_attempts) +
                " attempts; last error: " + last_error);
}

RemoteOracle::RemoteOracle(std::string name, ChatClient client)
    : name_(std::move(name)), client_(std::move(client)) {}

OracleAnswer RemoteOracle::solve(const std::string& problem) const {
  try {
    const auto reply = client_.complete(
        {{"system", "Solve the problem. End with a line 'Final Answer: <answer>'."},
         {"user", problem}});
    std::string answer = last_declared_answer(reply.content);
    return {answer, !answer.empty()};
  } catch (const IoError&) {
    return {};
  }
}

}  // namespace hrt
