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

#include "hrt/harness/eval.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <numeric>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "hrt/answer.hpp"
#include "hrt/errors.hpp"
#include "hrt/objective/tokenizer.hpp"

namespace hrt {

namespace {

TaskResult run_task(const GeneratorFactory& factory, const BenchmarkTask& task, const EvalOptions& options) {
  TaskResult r;
  r.id = task.id;
  r.gold = task.gold;
  try {
    auto generator = factory(task);
    if (!generator) throw ContractError("generator factory returned null");
    const auto session = run_guided_inference(task.problem, *generator, options.controller, options.rules,
                                              options.policy);
    r.transcript = session.transcript;
    r.tokens = count_tokens(session.transcript);
    r.steps = session.step;
    r.interventions = session.events.size();
    if (session.final_state) r.final_state = to_string(*session.final_state);
    r.predicted = session.solution;
    if (session.error) {
      r.outcome = TaskOutcome::kError;
      r.reason = session.error_message;
    } else if (session.no_answer) {
      r.outcome = TaskOutcome::kNoAnswer;
    } else {
      r.outcome = answers_match(session.solution, task.gold) ? TaskOutcome::kCorrect : TaskOutcome::kWrong;
    }
  } catch (const std::exception& e) {
    r.outcome = TaskOutcome::kError;
    r.reason = e.what();
  }
  return r;
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string to_string(TaskOutcome outcome) {
  switch (outcome) {
    case TaskOutcome::kCorrect: return "CORRECT";
    case TaskOutcome::kWrong: return "WRONG";
    case TaskOutcome::kNoAnswer: return "NO_ANSWER";
    case TaskOutcome::kError: return "ERROR";
  }
  return "ERROR";
}

std::vector<BenchmarkTask> tasks_from_triplets(const std::vector<Triplet>& records) {
  std::vector<BenchmarkTask> tasks;
  tasks.reserve(records.size());
  for (const auto& t : records) {
    if (normalize_answer(t.solution).empty()) {
      throw InputError("task '" + t.id + "': gold answer is empty after normalization");
    }
    tasks.push_back({t.id, t.problem, t.solution, t.category.value_or("")});
  }
  return tasks;
}

double EvalReport::accuracy() const {
  return task_count == 0 ? 0.0 : static_cast<double>(correct_count) / static_cast<double>(task_count);
}

double EvalReport::mean_tokens() const {
  if (results.empty()) return 0.0;
  std::size_t total = 0;
  for (const auto& r : results) total += r.tokens;
  return static_cast<double>(total) / static_cast<double>(results.size());
}

EvalReport eval(const GeneratorFactory& factory, const std::vector<BenchmarkTask>& tasks,
                const EvalOptions& options, const std::string& fingerprint) {
  if (tasks.empty()) throw ContractError("eval: empty task list");
  std::vector<TaskResult> results(tasks.size());
  const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, tasks.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) results[i] = run_task(factory, tasks[i], options);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) results[i] = run_task(factory, tasks[i], options);
      });
    }
  }
  // Ordered reduction by task id, independent of scheduling.
  std::vector<std::size_t> order(tasks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return tasks[a].id < tasks[b].id; });

  EvalReport report;
  report.fingerprint = fingerprint;
  report.task_count = tasks.size();
  for (std::size_t i : order) {
    if (results[i].outcome == TaskOutcome::kCorrect) ++report.correct_count;
    report.results.push_back(std::move(results[i]));
  }
  return report;
}

void write_eval_report(std::ostream& out, const EvalReport& report) {
  nlohmann::ordered_json j;
  j["fingerprint"] = report.fingerprint;
  j["task_count"] = report.task_count;
  j["correct_count"] = report.correct_count;
  j["accuracy"] = report.accuracy();
  j["mean_tokens"] = report.mean_tokens();
  auto tasks = nlohmann::ordered_json::array();
  for (const auto& r : report.results) {
    nlohmann::ordered_json t;
    t["id"] = r.id;
    t["outcome"] = to_string(r.outcome);
    t["predicted"] = r.predicted;
    t["gold"] = r.gold;
    t["reason"] = r.reason.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(r.reason);
    t["tokens"] = r.tokens;
    t["steps"] = r.steps;
    t["interventions"] = r.interventions;
    t["final_state"] = r.final_state.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(r.final_state);
    tasks.push_back(std::move(t));
  }
  j["tasks"] = std::move(tasks);
  out << j.dump(2) << '\n';
}

void write_transcripts(std::ostream& out, const EvalReport& report) {
  for (const auto& r : report.results) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["outcome"] = to_string(r.outcome);
    j["transcript"] = r.transcript;
    out << j.dump() << '\n';
  }
}

ScalingCurve scaling_sweep(const GeneratorFactory& factory, const std::vector<BenchmarkTask>& tasks,
                           const std::vector<std::size_t>& budgets, const EvalOptions& options,
                           const std::string& fingerprint) {
  if (budgets.empty()) throw ContractError("scaling_sweep: no budgets");
  for (std::size_t i = 1; i < budgets.size(); ++i) {
    if (budgets[i] <= budgets[i - 1]) throw ContractError("scaling_sweep: budgets must be strictly increasing");
  }
  ScalingCurve curve;
  curve.fingerprint = fingerprint;
  for (std::size_t b : budgets) {
    EvalOptions o = options;
    o.controller.max_interventions = b;
    const auto report = eval(factory, tasks, o, fingerprint);
    curve.points.push_back({b, report.correct_count, report.task_count, report.accuracy(), report.mean_tokens()});
  }
  return curve;
}

void write_curve_csv(std::ostream& out, const ScalingCurve& curve) {
  out << "budget,accuracy,mean_tokens\n";
  for (const auto& p : curve.points) {
    out << p.budget << ',' << shortest(p.accuracy) << ',' << shortest(p.mean_tokens) << '\n';
  }
}

}  // namespace hrt
