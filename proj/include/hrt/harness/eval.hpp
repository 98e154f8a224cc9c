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

#ifndef HRT_HARNESS_EVAL_HPP
#define HRT_HARNESS_EVAL_HPP

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "hrt/curation/triplet.hpp"
#include "hrt/intervention/controller.hpp"

namespace hrt {

struct BenchmarkTask {
  std::string id;
  std::string problem;
  std::string gold;
  std::string domain;
};

/// Task files use the triplet record: solution is the gold answer and
/// category the domain. InputError when a gold answer normalizes to "".
std::vector<BenchmarkTask> tasks_from_triplets(const std::vector<Triplet>& records);

/// Builds a fresh generator for one task. Called once per task, possibly
/// from several threads at once when EvalOptions::threads > 1.
using GeneratorFactory = std::function<std::unique_ptr<Generator>(const BenchmarkTask&)>;

struct EvalOptions {
  ControllerOptions controller;
  DetectorRules rules;
  PhraseTable policy;
  std::size_t threads = 1;
};

enum class TaskOutcome { kCorrect, kWrong, kNoAnswer, kError };
std::string to_string(TaskOutcome outcome);

struct TaskResult {
  std::string id;
  TaskOutcome outcome = TaskOutcome::kError;
  std::string predicted;
  std::string gold;
  std::string reason;  // error text for kError
  std::size_t tokens = 0;
  std::size_t steps = 0;
  std::size_t interventions = 0;
  std::string final_state;  // "" when never classified
  std::string transcript;
};

struct EvalReport {
  std::size_t task_count = 0;
  std::size_t correct_count = 0;
  std::vector<TaskResult> results;  // in task-id order
  std::string fingerprint;

  double accuracy() const;
  double mean_tokens() const;
};

/// One guided session per task. A failing task (generator error, factory
/// error) is scored incorrect with its reason; it never aborts the run.
/// ContractError on an empty task list.
EvalReport eval(const GeneratorFactory& factory, const std::vector<BenchmarkTask>& tasks,
                const EvalOptions& options = {}, const std::string& fingerprint = "");

/// Summary JSON object followed by nothing else: fingerprint, task_count,
/// correct_count, accuracy, mean_tokens and a per-task array.
void write_eval_report(std::ostream& out, const EvalReport& report);

/// One line per task: id, outcome, transcript.
void write_transcripts(std::ostream& out, const EvalReport& report);

struct ScalingPoint {
  std::size_t budget = 0;
  std::size_t correct_count = 0;
  std::size_t task_count = 0;
  double accuracy = 0;
  double mean_tokens = 0;
};

struct ScalingCurve {
  std::vector<ScalingPoint> points;
  std::string fingerprint;
};

/// Runs eval once per budget with max_interventions = budget. Everything
/// else in `options` (step cap, mode, rules) is held fixed. ContractError
/// unless budgets are non-empty and strictly increasing.
ScalingCurve scaling_sweep(const GeneratorFactory& factory, const std::vector<BenchmarkTask>& tasks,
                           const std::vector<std::size_t>& budgets, const EvalOptions& options = {},
                           const std::string& fingerprint = "");

/// Header "budget,accuracy,mean_tokens", one row per point, LF endings.
void write_curve_csv(std::ostream& out, const ScalingCurve& curve);

}  // namespace hrt

#endif  // HRT_HARNESS_EVAL_HPP
