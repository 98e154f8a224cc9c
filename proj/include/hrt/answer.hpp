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

// Final-answer declarations and answer matching shared by curation, the
// detector and evaluation.

#ifndef HRT_ANSWER_HPP
#define HRT_ANSWER_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace hrt {

/// A declaration is either a line containing "Final Answer:" (any case; the
/// payload is the rest of that line) or a \boxed{...} group.
struct AnswerDeclaration {
  std::size_t offset = 0;  // byte offset of the declaration in the text
  std::string payload;     // trimmed, one trailing '.' removed
};

std::vector<AnswerDeclaration> find_answer_declarations(std::string_view text);

/// Payload of the last declaration; empty when there is none.
std::string last_declared_answer(std::string_view text);

/// Canonical form for exact-match scoring: trimmed, lower-cased, inner
/// whitespace collapsed, surrounding $ and \boxed{} removed, integers without
/// leading zeros or '+', fractions reduced, decimals without padding zeros.
std::string normalize_answer(std::string_view answer);

bool answers_match(std::string_view a, std::string_view b);

}  // namespace hrt

#endif  // HRT_ANSWER_HPP
