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

#include "hrt/objective/trace.hpp"

#include <cmath>
#include <string_view>

#include "hrt/errors.hpp"

namespace hrt {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\f\v");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

void append(std::vector<TokenId>& dst, const std::vector<TokenId>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace

std::vector<TokenId> ReasoningTrace::concatenated() const {
  std::vector<TokenId> seq;
  seq.reserve(total_length());
  append(seq, problem);
  append(seq, strategic);
  append(seq, tactical);
  append(seq, operational);
  append(seq, answer);
  return seq;
}

void SegmentationRule::validate() const {
  double total = 0;
  for (double f : fractions) {
    if (!(f > 0)) throw ContractError("segmentation fractions must be positive");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ContractError("segmentation fractions must sum to 1");
  for (const auto& m : markers) {
    if (trim(m).empty()) throw ContractError("segmentation markers must be non-blank");
  }
}

std::array<std::size_t, 3> proportional_split(std::size_t n,
                                              const std::array<double, 3>& fractions) {
  const auto cut = [n](double f) {
    const auto c = static_cast<std::size_t>(std::llround(static_cast<double>(n) * f));
    return c > n ? n : c;
  };
  const std::size_t b1 = cut(fractions[0]);
  std::size_t b2 = cut(fractions[0] + fractions[1]);
  if (b2 < b1) b2 = b1;
  return {b1, b2 - b1, n - b2};
}

SegmentedTrace segment_trace(const RawTrace& raw, const SegmentationRule& rule,
                             const Tokenizer& tokenizer) {
  rule.validate();
  if (count_tokens(raw.reasoning) == 0) throw ContractError("segment_trace: empty reasoning");
  if (count_tokens(raw.solution) == 0) throw ContractError("segment_trace: empty solution");

  SegmentedTrace out;
  out.trace.problem = tokenizer.encode(raw.problem);
  out.trace.answer = tokenizer.encode(raw.solution);

  if (rule.mode == SegmentationRule::Mode::kMarked) {
    const auto lines = split_lines(raw.reasoning);
    std::vector<std::size_t> seen;  // level of each marker line, in order
    std::vector<int> level_of(lines.size(), -1);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      for (int k = 0; k < 3; ++k) {
        if (trim(lines[i]) == trim(rule.markers[static_cast<std::size_t>(k)])) {
          level_of[i] = k;
          seen.push_back(static_cast<std::size_t>(k));
        }
      }
    }
    if (seen == std::vector<std::size_t>{0, 1, 2}) {
      std::array<std::vector<TokenId>*, 3> dst{&out.trace.strategic, &out.trace.tactical,
                                               &out.trace.operational};
      int current = 0;
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (level_of[i] >= 0) {
          current = level_of[i];
          continue;
        }
        append(*dst[static_cast<std::size_t>(current)], tokenizer.encode(lines[i]));
      }
      return out;
    }
    out.used_fallback = true;
    out.warnings.push_back(seen.empty()
                               ? "no level markers found; split proportionally"
                               : "level markers missing, repeated or out of order; split "
                                 "proportionally");
  }

  const auto stream = tokenizer.encode(raw.reasoning);
  const auto sizes = proportional_split(stream.size(), rule.fractions);
  auto it = stream.begin();
  out.trace.strategic.assign(it, it + static_cast<std::ptrdiff_t>(sizes[0]));
  it += static_cast<std::ptrdiff_t>(sizes[0]);
  out.trace.tactical.assign(it, it + static_cast<std::ptrdiff_t>(sizes[1]));
  it += static_cast<std::ptrdiff_t>(sizes[1]);
  out.trace.operational.assign(it, stream.end());
  return out;
}

}  // namespace hrt
