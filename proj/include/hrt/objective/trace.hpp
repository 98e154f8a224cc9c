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

#ifndef HRT_OBJECTIVE_TRACE_HPP
#define HRT_OBJECTIVE_TRACE_HPP

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "hrt/numerics/ops.hpp"
#include "hrt/objective/tokenizer.hpp"

namespace hrt {

/// A training example split by abstraction level. Only the answer must be
/// non-empty.
struct ReasoningTrace {
  std::vector<TokenId> problem;
  std::vector<TokenId> strategic;
  std::vector<TokenId> tactical;
  std::vector<TokenId> operational;
  std::vector<TokenId> answer;

  std::size_t total_length() const {
    return problem.size() + strategic.size() + tactical.size() + operational.size() +
           answer.size();
  }
  /// x || strat || tact || op || y
  std::vector<TokenId> concatenated() const;

  bool operator==(const ReasoningTrace&) const = default;
};

/// Raw text of one example before tokenization.
struct RawTrace {
  std::string problem;
  std::string reasoning;
  std::string solution;
};

struct SegmentationRule {
  enum class Mode { kMarked, kProportional };

  Mode mode = Mode::kMarked;
  // A marker is a reasoning line whose trimmed text equals one of these.
  std::array<std::string, 3> markers{"[STRATEGIC]", "[TACTICAL]", "[OPERATIONAL]"};
  std::array<double, 3> fractions{0.2, 0.3, 0.5};

  void validate() const;
};

struct SegmentedTrace {
  ReasoningTrace trace;
  bool used_fallback = false;
  std::vector<std::string> warnings;
};

/// Splits `n` tokens at rounded cumulative fractions; returns segment sizes.
std::array<std::size_t, 3> proportional_split(std::size_t n, const std::array<double, 3>& fractions);

/// MARKED: text after each marker line up to the next belongs to that level;
/// text before the first marker counts as strategic. Markers must each occur
/// exactly once and in level order, otherwise the rule falls back to
/// PROPORTIONAL with a warning. Marker lines themselves are dropped.
/// Throws ContractError when the reasoning or the solution is empty.
SegmentedTrace segment_trace(const RawTrace& raw, const SegmentationRule& rule,
                             const Tokenizer& tokenizer);

}  // namespace hrt

#endif  // HRT_OBJECTIVE_TRACE_HPP
