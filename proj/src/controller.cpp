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

#include "hrt/intervention/controller.hpp"

#include <map>
#include <nlohmann/json.hpp>
#include <ostream>

#include "hrt/answer.hpp"
#include "hrt/errors.hpp"
#include "hrt/objective/tokenizer.hpp"

namespace hrt {

namespace {

void strip_termination(std::string& transcript, const DetectorRules& rules) {
  auto end = transcript.find_last_not_of(" \t\r\n");
  if (end == std::string::npos) return;
  for (const auto& m : rules.termination_markers) {
    if (m.empty()) continue;
    const std::string_view body(transcript.data(), end + 1);
    if (body.ends_with(m)) {
      transcript.erase(end + 1 - m.size());
      return;
    }
  }
}

void append_line(std::string& transcript, const std::string& line) {
  if (!transcript.empty() && transcript.back() != '\n') transcript += '\n';
  transcript += line;
  transcript += '\n';
}

}  // namespace

ExtractedSolution extract_solution(std::string_view transcript) {
  ExtractedSolution out;
  out.answer = last_declared_answer(transcript);
  out.no_answer = out.answer.empty();
  return out;
}

GenerationSession run_guided_inference(const std::string& problem, Generator& generator,
                                       const ControllerOptions& options, const DetectorRules& rules,
                                       const PhraseTable& policy) {
  if (options.step_cap < 1) throw ContractError("run_guided_inference: step cap must be >= 1");
  if (options.mode == ControlMode::kBudgetForcing && options.forcing_phrase.empty()) {
    throw ContractError("run_guided_inference: empty forcing phrase");
  }
  DetectorRules effective = rules;
  for (const auto& p : policy.all()) effective.guidance_lines.push_back(p);
  effective.guidance_lines.push_back(options.forcing_phrase);

  GenerationSession s;
  s.problem = problem;
  s.step_cap = options.step_cap;
  std::map<Technique, std::size_t> uses;

  while (s.step < options.step_cap) {
    std::string chunk;
    try {
      chunk = generator.next_chunk(problem, s.transcript);
    } catch (const std::exception& e) {
      s.error = true;
      s.error_message = e.what();
      break;
    }
    s.transcript += chunk;
    ++s.step;
    StepLog entry;
    entry.step = s.step;
    entry.chunk_tokens = count_tokens(chunk);
    entry.terminating = is_terminating(s.transcript, effective);
    if (!entry.terminating) {
      s.log.push_back(entry);
      continue;
    }
    if (options.max_interventions && s.events.size() >= *options.max_interventions) {
      s.intervention_cap_reached = true;
      s.log.push_back(entry);
      break;
    }
    const auto detection = detect_reasoning_state(s.transcript, effective, problem);
    InterventionEvent event;
    event.step = s.step;
    event.detected_state = detection.state;
    if (options.mode == ControlMode::kGuided) {
      entry.state = detection.state;
      s.classifications.push_back(detection.state);
      if (detection.state == ReasoningState::kComplete) {
        s.completed = true;
        s.log.push_back(entry);
        break;
      }
      event.technique = technique_for(detection.state);
      event.injected_text = guidance_for(detection.state, policy, uses[event.technique]++);
    } else {
      event.technique = Technique::kExtension;
      event.injected_text = options.forcing_phrase;
    }
    strip_termination(s.transcript, effective);
    append_line(s.transcript, event.injected_text);
    s.events.push_back(event);
    entry.event = event;
    s.log.push_back(entry);
  }

  if (!s.completed && !s.error && !s.intervention_cap_reached) {
    s.budget_exhausted = s.step >= options.step_cap;
  }
  if (is_terminating(s.transcript, effective)) {
    s.final_state = detect_reasoning_state(s.transcript, effective, problem).state;
  }
  const auto solution = extract_solution(s.transcript);
  s.solution = solution.answer;
  s.no_answer = solution.no_answer;
  return s;
}

void write_session_audit(std::ostream& out, const GenerationSession& session) {
  for (const auto& entry : session.log) {
    nlohmann::ordered_json j;
    j["step"] = entry.step;
    j["chunk_tokens"] = entry.chunk_tokens;
    j["terminating"] = entry.terminating;
    j["state"] = entry.state ? nlohmann::ordered_json(to_string(*entry.state)) : nlohmann::ordered_json(nullptr);
    if (entry.event) {
      if (!entry.state) j["state"] = to_string(entry.event->detected_state);
      j["technique"] = to_string(entry.event->technique);
      j["injected"] = entry.event->injected_text;
    } else {
      j["technique"] = nullptr;
      j["injected"] = nullptr;
    }
    out << j.dump() << '\n';
  }
}

}  // namespace hrt
