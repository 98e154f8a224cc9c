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

#include "hrt/curation/filters.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "hrt/answer.hpp"

namespace hrt {

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::size_t count(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string_view::npos; p = text.find(needle, p + needle.size())) ++n;
  return n;
}

bool math_balanced(std::string_view text) {
  if (count(text, "\\(") != count(text, "\\)")) return false;
  if (count(text, "\\[") != count(text, "\\]")) return false;
  std::size_t dollars = 0;
  int depth = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const bool escaped = i > 0 && text[i - 1] == '\\';
    if (escaped) continue;
    if (text[i] == '$') ++dollars;
    if (text[i] == '{') ++depth;
    if (text[i] == '}' && --depth < 0) return false;
  }
  return depth == 0 && dollars % 2 == 0;
}

bool truncated(std::string_view text) {
  std::string low(text);
  for (auto& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (std::string_view sentinel : {"[truncated]", "<truncated>", "<|truncated|>"}) {
    if (low.find(sentinel) != std::string::npos) return true;
  }
  auto end = low.find_last_not_of(" \t\r\n");
  if (end == std::string::npos) return false;
  const std::string_view tail = std::string_view(low).substr(0, end + 1);
  return tail.ends_with("...") || tail.ends_with("\xE2\x80\xA6");
}

// Lines of the form "Step <n>:" or "Step <n>." (any case, leading blanks
// allowed) must number 1, 2, 3, ... in order.
bool steps_consistent(std::string_view text) {
  const auto space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; };
  long expected = 1;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    std::size_t i = 0;
    while (i < line.size() && space(line[i])) ++i;
    if (line.size() - i < 4) continue;
    std::string word(line.substr(i, 4));
    for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (word != "step") continue;
    i += 4;
    const std::size_t gap = i;
    while (i < line.size() && space(line[i])) ++i;
    if (i == gap) continue;
    const std::size_t digits = i;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i == digits) continue;
    const std::string number(line.substr(digits, i - digits));
    while (i < line.size() && space(line[i])) ++i;
    if (i == line.size() || (line[i] != ':' && line[i] != '.')) continue;
    if (number.size() > 9 || std::stol(number) != expected) return false;
    ++expected;
  }
  return true;
}

bool contradictory(const Triplet& t) {
  std::string last;
  for (const auto* text : {&t.reasoning, &t.solution}) {
    for (const auto& d : find_answer_declarations(*text)) {
      const std::string n = normalize_answer(d.payload);
      if (n.empty()) continue;
      if (!last.empty() && n != last) return true;
      last = n;
    }
  }
  return false;
}

}  // namespace

std::string to_string(QualityIssue issue) {
  switch (issue) {
    case QualityIssue::kEmptyField: return "EMPTY_FIELD";
    case QualityIssue::kEmptyReasoning: return "EMPTY_REASONING";
    case QualityIssue::kUnbalancedMath: return "UNBALANCED_MATH";
    case QualityIssue::kTruncated: return "TRUNCATED";
    case QualityIssue::kStepMarkerInconsistent: return "STEP_MARKER_INCONSISTENT";
    case QualityIssue::kContradictoryAnswer: return "CONTRADICTORY_ANSWER";
  }
  return "UNKNOWN";
}

std::optional<QualityIssue> check_quality(const Triplet& t) {
  if (blank(t.problem) || blank(t.solution)) return QualityIssue::kEmptyField;
  if (blank(t.reasoning)) return QualityIssue::kEmptyReasoning;
  for (const auto* text : {&t.problem, &t.reasoning, &t.solution}) {
    if (!math_balanced(*text)) return QualityIssue::kUnbalancedMath;
  }
  if (truncated(t.reasoning) || truncated(t.solution)) return QualityIssue::kTruncated;
  if (!steps_consistent(t.reasoning)) return QualityIssue::kStepMarkerInconsistent;
  if (contradictory(t)) return QualityIssue::kContradictoryAnswer;
  return std::nullopt;
}

QualityResult quality_filter(const std::vector<Triplet>& pool) {
  QualityResult out;
  for (const auto& t : pool) {
    if (auto issue = check_quality(t)) {
      out.rejected.emplace_back(t, *issue);
    } else {
      out.kept.push_back(t);
    }
  }
  return out;
}

bool oracle_correct(const SolverOracle& oracle, const Triplet& t) {
  const auto a = oracle.solve(t.problem);
  return a.answered && answers_match(a.answer, t.solution);
}

ThresholdOracle::ThresholdOracle(std::string name, int capability)
    : name_(std::move(name)), capability_(capability) {}

OracleAnswer ThresholdOracle::solve(const std::string& problem) const {
  static const std::regex difficulty(R"(difficulty\s+(\d+))", std::regex::icase);
  static const std::regex task(R"(compute\s+(-?\d+)\s*([-+*])\s*(-?\d+))", std::regex::icase);
  std::smatch d;
  std::smatch c;
  if (!std::regex_search(problem, d, difficulty) || !std::regex_search(problem, c, task)) return {};
  const long long a = std::stoll(c[1].str());
  const long long b = std::stoll(c[3].str());
  const char op = c[2].str()[0];
  long long value = op == '+' ? a + b : op == '-' ? a - b : a * b;
  if (std::stoi(d[1].str()) > capability_) value += 1;
  return {std::to_string(value), true};
}

DifficultyResult difficulty_filter(const std::vector<Triplet>& pool, const SolverOracle& small,
                                   const SolverOracle& large) {
  DifficultyResult out;
  for (const auto& t : pool) {
    bool correct_any = false;
    for (const SolverOracle* oracle : {&small, &large}) {
      const auto a = oracle->solve(t.problem);
      if (!a.answered) {
        ++out.oracle_failures;
        out.log.push_back(oracle->name() + ": no answer for " + t.id);
        continue;
      }
      if (answers_match(a.answer, t.solution)) {
        correct_any = true;
        ++(oracle == &small ? out.solved_by_small : out.solved_by_large);
        break;
      }
    }
    if (!correct_any) out.kept.push_back(t);
  }
  return out;
}

}  // namespace hrt
