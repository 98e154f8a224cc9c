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

// Client for a chat-completion HTTP endpoint (OpenAI-style), so a served
// model can act as a solver oracle or a generator. Plain http only.
//
// Request  POST <path>  {"model": m, "messages": [{"role", "content"}...],
//                        "temperature": t, "max_tokens": n}
// Response {"choices": [{"message": {"content": "..."}, "finish_reason": "..."}]}

#ifndef HRT_CURATION_CHAT_CLIENT_HPP
#define HRT_CURATION_CHAT_CLIENT_HPP

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include "hrt/curation/filters.hpp"

namespace hrt {

struct ChatMessage {
  std::string role;  // "system", "user" or "assistant"
  std::string content;
};

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};

  /// Delay before retry number `retry` (1-based).
  std::chrono::milliseconds backoff(int retry) const;
};

struct ChatClientOptions {
  std::string endpoint = "http://127.0.0.1:8000/v1/chat/completions";
  std::string model = "default";
  std::string api_key;  // sent as a Bearer token when set
  double temperature = 0.0;
  int max_tokens = 1024;
  std::chrono::seconds timeout{60};
  RetryPolicy retry;
};

struct ChatReply {
  std::string content;
  std::string finish_reason;
  int attempts = 0;
};

class ChatClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  /// ContractError for an endpoint that is not http://host[:port]/path.
  explicit ChatClient(ChatClientOptions options, Sleeper sleep = {});

  /// Retries transport failures, 429 and 5xx with exponential backoff.
  /// Throws IoError on other statuses, a malformed body, or when attempts
  /// run out.
  ChatReply complete(const std::vector<ChatMessage>& messages) const;

  const ChatClientOptions& options() const { return options_; }

 private:
  ChatClientOptions options_;
  std::string origin_;
  std::string path_;
  Sleeper sleep_;
};

/// Oracle backed by a chat endpoint; the answer is the last declared final
/// answer in the reply. Transport failures count as "no answer".
class RemoteOracle : public SolverOracle {
 public:
  RemoteOracle(std::string name, ChatClient client);
  std::string name() const override { return name_; }
  OracleAnswer solve(const std::string& problem) const override;

 private:
  std::string name_;
  ChatClient client_;
};

}  // namespace hrt

#endif  // HRT_CURATION_CHAT_CLIENT_HPP
