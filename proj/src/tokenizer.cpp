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

#include "hrt/objective/tokenizer.hpp"

#include <algorithm>
#include <set>

#include "hrt/errors.hpp"

namespace hrt {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) words.push_back(text.substr(start, i - start));
  }
  return words;
}

std::size_t count_tokens(std::string_view text) { return split_words(text).size(); }

Tokenizer::Tokenizer(std::vector<std::string> vocabulary) : vocabulary_(std::move(vocabulary)) {
  if (vocabulary_.empty() || vocabulary_.front() != "<unk>") {
    throw ContractError("tokenizer vocabulary must start with <unk>");
  }
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    if (!index_.emplace(vocabulary_[i], static_cast<TokenId>(i)).second) {
      throw ContractError("duplicate vocabulary entry '" + vocabulary_[i] + "'");
    }
  }
}

Tokenizer Tokenizer::from_corpus(const std::vector<std::string>& texts) {
  std::set<std::string> words;
  for (const auto& text : texts) {
    for (auto w : split_words(text)) words.emplace(w);
  }
  words.erase("<unk>");
  std::vector<std::string> vocab{"<unk>"};
  vocab.insert(vocab.end(), words.begin(), words.end());
  return Tokenizer(std::move(vocab));
}

TokenId Tokenizer::id_of(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnknown : it->second;
}

std::vector<TokenId> Tokenizer::encode(std::string_view text) const {
  std::vector<TokenId> ids;
  for (auto w : split_words(text)) ids.push_back(id_of(w));
  return ids;
}

std::string Tokenizer::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocabulary_.size()) {
      throw InputError("decode: token id " + std::to_string(id) + " outside vocabulary");
    }
    if (!out.empty()) out += ' ';
    out += vocabulary_[static_cast<std::size_t>(id)];
  }
  return out;
}

}  // namespace hrt
