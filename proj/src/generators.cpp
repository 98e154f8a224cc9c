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

#include "hrt/intervention/generators.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>
#include <stdexcept>

#include "hrt/errors.hpp"
#include "hrt/random.hpp"

namespace hrt {

namespace {

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(a, b - a + 1));
}

// Counts transcript lines equal to one of `phrases`.
std::size_t count_lines(const std::string& transcript, const std::vector<std::string>& phrases) {
  std::size_t n = 0;
  std::size_t start = 0;
  while (start <= transcript.size()) {
    auto nl = transcript.find('\n', start);
    if (nl == std::string::npos) nl = transcript.size();
    const std::string line = trim(std::string_view(transcript).substr(start, nl - start));
    if (!line.empty() && std::find(phrases.begin(), phrases.end(), line) != phrases.end()) ++n;
    start = nl + 1;
  }
  return n;
}

Triplet task(std::size_t i, Rng& rng, const std::string& script, const std::string& domain) {
  const long long a = 10 + static_cast<long long>(rng.index(90));
  const long long b = 10 + static_cast<long long>(rng.index(90));
  Triplet t;
  char id[32];
  std::snprintf(id, sizeof id, "task-%04zu", i);
  t.id = id;
  t.problem = "Task " + std::to_string(i) + ": compute " + std::to_string(a) + " + " +
              std::to_string(b) + ". [script " + script + "]";
  t.solution = std::to_string(a + b);
  t.source = "synthetic-tasks";
  t.category = domain;
  return t;
}

}  // namespace

// ---- ScriptedGenerator

ScriptedGenerator::ScriptedGenerator(std::vector<std::string> chunks, bool cycle)
    : chunks_(std::move(chunks)), cycle_(cycle) {
  if (chunks_.empty()) throw ContractError("ScriptedGenerator: empty script");
}

std::string ScriptedGenerator::next_chunk(const std::string&, const std::string&) {
  const std::size_t i = calls_++;
  if (i < chunks_.size()) return chunks_[i];
  if (cycle_) return chunks_[i % chunks_.size()];
  throw std::runtime_error("scripted generator ran out of chunks at call " + std::to_string(i + 1));
}

// ---- SyntheticReasoner

SyntheticReasoner::SyntheticReasoner(PhraseTable policy, std::string forcing_phrase)
    : policy_(std::move(policy)), forcing_phrase_(std::move(forcing_phrase)) {}

std::string SyntheticReasoner::next_chunk(const std::string& problem, const std::string& transcript) {
  static const std::regex sum(R"(compute\s+(-?\d+)\s*\+\s*(-?\d+))");
  static const std::regex script(R"(\[script\s+(think=(\d+)|redirect|verify|wrong)\])");
  std::smatch m;
  std::smatch tag;
  if (!std::regex_search(problem, m, sum) || !std::regex_search(problem, tag, script)) {
    throw InputError("synthetic reasoner: problem lacks 'compute A + B' or a [script ...] tag");
  }
  const long long a = std::stoll(m[1].str());
  const long long b = std::stoll(m[2].str());
  const std::string c = std::to_string(a + b);
  const std::string wrong = std::to_string(a + b + 1);
  const std::string step = "Step " + std::to_string(count_lines(transcript, policy_.all()) +
                                                    count_lines(transcript, {forcing_phrase_}) + 1);
  const std::string verified = step + ": " + std::to_string(a) + " + " + std::to_string(b) +
                               " = " + c + ".\ncheck: substituting back, " + c + " - " +
                               std::to_string(b) + " = " + std::to_string(a) + " holds.\n" +
                               "Final Answer: " + c + "\n";

  auto all = policy_.all();
  all.push_back(forcing_phrase_);
  const std::string kind = tag[1].str();
  if (kind.rfind("think=", 0) == 0) {
    const std::size_t need = std::stoul(tag[2].str());
    if (count_lines(transcript, all) < need) {
      return step + ": still working through the setup.\n</think>\n";
    }
    return verified;
  }
  if (kind == "redirect") {
    if (count_lines(transcript, policy_.redirection) == 0) {
      return step + ": extending the first pattern, I'm not sure this holds.\nFinal Answer: " +
             wrong + "\n";
    }
    return verified;
  }
  if (kind == "verify") {
    if (count_lines(transcript, policy_.verification) == 0) {
      return step + ": " + std::to_string(a) + " + " + std::to_string(b) + " = " + c +
             ".\nFinal Answer: " + c + "\n";
    }
    return verified;
  }
  return step + ": the total comes out as " + wrong + ".\ncheck: substituting back confirms " + wrong +
         ".\nFinal Answer: " + wrong + "\n";
}

// ---- ModelGenerator

ModelGenerator::ModelGenerator(const Model& model, const Tokenizer& tokenizer,
                               std::size_t chunk_tokens, std::string stop_word)
    : model_(model), tokenizer_(tokenizer), chunk_tokens_(chunk_tokens), stop_word_(std::move(stop_word)) {
  if (chunk_tokens_ == 0) throw ContractError("ModelGenerator: chunk_tokens must be positive");
  if (tokenizer_.size() != static_cast<std::size_t>(model_.config().vocab_size)) {
    throw ContractError("ModelGenerator: tokenizer size " + std::to_string(tokenizer_.size()) +
                        " does not match model vocab " + std::to_string(model_.config().vocab_size));
  }
}

std::string ModelGenerator::next_chunk(const std::string& problem, const std::string& transcript) {
  std::vector<TokenId> context = tokenizer_.encode(problem + "\n" + transcript);
  if (context.empty()) context.push_back(Tokenizer::kUnknown);
  const auto limit = static_cast<std::size_t>(model_.config().max_seq_len);
  std::string out;
  for (std::size_t k = 0; k < chunk_tokens_; ++k) {
    if (context.size() > limit) context.erase(context.begin(), context.end() - static_cast<std::ptrdiff_t>(limit));
    const Matrix logits = model_.forward(context).value();
    Index best = 0;
    logits.row(logits.rows() - 1).maxCoeff(&best);
    const auto id = static_cast<TokenId>(best);
    context.push_back(id);
    const std::string& word = tokenizer_.vocabulary()[static_cast<std::size_t>(id)];
    if (!out.empty() || (!transcript.empty() && transcript.back() != '\n' && transcript.back() != ' ')) {
      out += ' ';
    }
    out += word;
    if (word == stop_word_) break;
  }
  return out;
}

// ---- RemoteGenerator

RemoteGenerator::RemoteGenerator(ChatClient client) : client_(std::move(client)) {}

std::string RemoteGenerator::next_chunk(const std::string& problem, const std::string& transcript) {
  std::vector<ChatMessage> messages{
      {"system",
       "Reason step by step. When done, end with a line 'Final Answer: <answer>'."},
      {"user", problem}};
  if (!transcript.empty()) {
    messages.push_back({"assistant", transcript});
    messages.push_back({"user", "Continue from where you stopped."});
  }
  return client_.complete(messages).content;
}

// ---- suites

std::vector<Triplet> make_thinking_suite(std::size_t n, std::size_t max_k, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Triplet> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(task(i, rng, "think=" + std::to_string(i % (max_k + 1)), "arithmetic"));
  }
  return out;
}

std::vector<Triplet> make_redirection_suite(std::size_t n, std::size_t redirect, std::uint64_t seed) {
  if (redirect > n) throw ContractError("redirection suite: redirect count exceeds size");
  Rng rng(seed);
  std::vector<Triplet> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(task(i, rng, i < redirect ? "redirect" : "think=1", "arithmetic"));
  return out;
}

std::vector<Triplet> make_fixed_suite(std::size_t n, std::size_t solvable, std::uint64_t seed) {
  if (solvable > n) throw ContractError("fixed suite: solvable count exceeds size");
  Rng rng(seed);
  std::vector<Triplet> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(task(i, rng, i < solvable ? "think=0" : "wrong", "arithmetic"));
  return out;
}

}  // namespace hrt
