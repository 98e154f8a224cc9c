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

#ifndef HRT_OBJECTIVE_TOKENIZER_HPP
#define HRT_OBJECTIVE_TOKENIZER_HPP

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hrt/numerics/ops.hpp"

namespace hrt {

/// Whitespace-delimited words. This is the project-wide notion of a "token"
/// for lengths (curation, detector windows, transcript sizes).
std::vector<std::string_view> split_words(std::string_view text);
std::size_t count_tokens(std::string_view text);

/// Word-level vocabulary. Id 0 is always "<unk>"; the remaining ids are the
/// corpus words in lexicographic order, so the table is a pure function of
/// the corpus.
class Tokenizer {
 public:
  static constexpr TokenId kUnknown = 0;

  explicit Tokenizer(std::vector<std::string> vocabulary);
  static Tokenizer from_corpus(const std::vector<std::string>& texts);

  std::vector<TokenId> encode(std::string_view text) const;
  std::string decode(std::span<const TokenId> ids) const;
  TokenId id_of(std::string_view word) const;

  std::size_t size() const { return vocabulary_.size(); }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }

 private:
  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, TokenId> index_;
};

}  // namespace hrt

#endif  // HRT_OBJECTIVE_TOKENIZER_HPP
