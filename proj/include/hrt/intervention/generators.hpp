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

#ifndef HRT_INTERVENTION_GENERATORS_HPP
#define HRT_INTERVENTION_GENERATORS_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hrt/curation/chat_client.hpp"
#include "hrt/curation/triplet.hpp"
#include "hrt/intervention/controller.hpp"
#include "hrt/model/transformer.hpp"
#include "hrt/objective/tokenizer.hpp"

namespace hrt {

/// Replays fixed chunks in order; throws once the script runs out unless
/// `cycle` is set, in which case the script repeats forever.
class ScriptedGenerator : public Generator {
 public:
  explicit ScriptedGenerator(std::vector<std::string> chunks, bool cycle = false);
  std::string name() const override { return "scripted"; }
  std::string next_chunk(const std::string& problem, const std::string& transcript) override;
  std::size_t calls() const { return calls_; }

 private:
  std::vector<std::string> chunks_;
  bool cycle_;
  std::size_t calls_ = 0;
};

/// Deterministic stand-in for a reasoning model on synthetic tasks. The
/// problem text carries "compute A + B" and a script tag:
///   [script think=K]  no answer until K guidance lines have been injected,
///                     then a verified correct answer
///   [script redirect] an uncertain wrong answer until a redirection phrase
///                     appears, then a verified correct answer
///   [script verify]   a correct but unverified answer, verified once any
///                     verification phrase appears
///   [script wrong]    a verified wrong answer
/// Its only state is what it reads back from the transcript.
class SyntheticReasoner : public Generator {
 public:
  explicit SyntheticReasoner(PhraseTable policy = {}, std::string forcing_phrase = "Wait");
  std::string name() const override { return "synthetic-reasoner"; }
  std::string next_chunk(const std::string& problem, const std::string& transcript) override;

 private:
  PhraseTable policy_;
  std::string forcing_phrase_;
};

/// Greedy word-level decoding from a trained model. The context is
/// problem + transcript, truncated on the left to fit max_seq_len.
class ModelGenerator : public Generator {
 public:
  ModelGenerator(const Model& model, const Tokenizer& tokenizer, std::size_t chunk_tokens = 256,
                 std::string stop_word = "</think>");
  std::string name() const override { return "model-greedy"; }
  std::string next_chunk(const std::string& problem, const std::string& transcript) override;

 private:
  const Model& model_;
  const Tokenizer& tokenizer_;
  std::size_t chunk_tokens_;
  std::string stop_word_;
};

/// Continues the transcript through a chat-completion endpoint.
class RemoteGenerator : public Generator {
 public:
  explicit RemoteGenerator(ChatClient client);
  std::string name() const override { return "remote"; }
  std::string next_chunk(const std::string& problem, const std::string& transcript) override;

 private:
  ChatClient client_;
};

// ---- synthetic task suites (solution = gold answer) ----

/// Task i needs k_i = i mod (max_k + 1) injections before it answers.
std::vector<Triplet> make_thinking_suite(std::size_t n, std::size_t max_k, std::uint64_t seed);

/// Tasks where a redirection is needed for the first `redirect` tasks and
/// plain extension (think=1) suffices for the rest.
std::vector<Triplet> make_redirection_suite(std::size_t n, std::size_t redirect, std::uint64_t seed);

/// `solvable` tasks answer correctly at once; the rest give a verified wrong
/// answer.
std::vector<Triplet> make_fixed_suite(std::size_t n, std::size_t solvable, std::uint64_t seed);

}  // namespace hrt

#endif  // HRT_INTERVENTION_GENERATORS_HPP
