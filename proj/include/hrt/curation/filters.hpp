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

#ifndef HRT_CURATION_FILTERS_HPP
#define HRT_CURATION_FILTERS_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hrt/curation/triplet.hpp"

namespace hrt {

// ---- quality -------------------------------------------------------------

/// Quality rules, version 1. Checked in this order; the first failure is the
/// reported reason.
enum class QualityIssue {
  kEmptyField,              // blank problem or solution
  kEmptyReasoning,          // blank reasoning
  kUnbalancedMath,          // \( \), \[ \], unescaped $ parity, or { } nesting
  kTruncated,               // ends with "..." / U+2026, or holds a truncation sentinel
  kStepMarkerInconsistent,  // "Step N:" lines not numbered 1, 2, 3, ...
  kContradictoryAnswer,     // final-answer declarations disagree
};

inline constexpr int kQualityRulesVersion = 1;

std::string to_string(QualityIssue issue);

std::optional<QualityIssue> check_quality(const Triplet& t);

struct QualityResult {
  std::vector<Triplet> kept;
  std::vector<std::pair<Triplet, QualityIssue>> rejected;
};

QualityResult quality_filter(const std::vector<Triplet>& pool);

// ---- oracles -------------------------------------------------------------

struct OracleAnswer {
  std::string answer;
  bool answered = false;  // false when the solver produced nothing
};

/// Something that attempts a problem. Must be deterministic per problem.
class SolverOracle {
 public:
  virtual ~SolverOracle() = default;
  virtual std::string name() const = 0;
  virtual OracleAnswer solve(const std::string& problem) const = 0;
};

/// True iff the oracle answered and its answer matches the triplet's
/// solution after normalization.
bool oracle_correct(const SolverOracle& oracle, const Triplet& t);

/// Solver for synthetic problems: reads the planted "difficulty D" and
/// "compute A <op> B" from the text and answers correctly iff
/// D <= capability; otherwise it is off by one. Problems it cannot parse get
/// no answer.
class ThresholdOracle : public SolverOracle {
 public:
  ThresholdOracle(std::string name, int capability);
  std::string name() const override { return name_; }
  OracleAnswer solve(const std::string& problem) const override;

 private:
  std::string name_;
  int capability_;
};

struct DifficultyResult {
  std::vector<Triplet> kept;
  std::size_t solved_by_small = 0;
  std::size_t solved_by_large = 0;  // solved by large but not by small
  std::size_t oracle_failures = 0;  // unanswered calls, counted as incorrect
  std::vector<std::string> log;
};

/// Keeps the triplets that both oracles get wrong.
DifficultyResult difficulty_filter(const std::vector<Triplet>& pool, const SolverOracle& small,
                                   const SolverOracle& large);

}  // namespace hrt

#endif  // HRT_CURATION_FILTERS_HPP
