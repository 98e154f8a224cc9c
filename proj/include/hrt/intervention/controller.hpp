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

#ifndef HRT_INTERVENTION_CONTROLLER_HPP
#define HRT_INTERVENTION_CONTROLLER_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hrt/intervention/detector.hpp"

namespace hrt {

/// Produces the next chunk of reasoning for (problem, transcript so far).
/// A chunk ends at a termination attempt or at a chunk boundary. Throwing
/// marks the session as failed.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string name() const = 0;
  virtual std::string next_chunk(const std::string& problem, const std::string& transcript) = 0;
};

enum class ControlMode {
  kGuided,          // classify each termination attempt and inject matching guidance
  kBudgetForcing,   // append the same extension phrase at every termination attempt
};

struct ControllerOptions {
  std::size_t step_cap = 16;  // T: maximum generator calls
  // Maximum injections. Once used up, the next termination attempt ends the
  // session. Unset means only the step cap bounds the session.
  std::optional<std::size_t> max_interventions;
  ControlMode mode = ControlMode::kGuided;
  std::string forcing_phrase = "Wait";
};

struct InterventionEvent {
  std::size_t step = 0;
  ReasoningState detected_state = ReasoningState::kPartial;
  std::string injected_text;
  Technique technique = Technique::kExtension;
};

struct StepLog {
  std::size_t step = 0;
  std::size_t chunk_tokens = 0;
  bool terminating = false;
  std::optional<ReasoningState> state;  // classification made at this step
  std::optional<InterventionEvent> event;
};

struct GenerationSession {
  std::string problem;
  std::string transcript;
  std::size_t step = 0;
  std::size_t step_cap = 0;
  std::vector<InterventionEvent> events;
  std::vector<ReasoningState> classifications;  // guided mode only
  std::vector<StepLog> log;
  std::optional<ReasoningState> final_state;
  bool completed = false;         // guided mode saw COMPLETE
  bool budget_exhausted = false;  // step cap hit without COMPLETE
  bool intervention_cap_reached = false;
  bool error = false;
  std::string error_message;
  bool no_answer = false;
  std::string solution;
};

struct ExtractedSolution {
  std::string answer;
  bool no_answer = true;
};

ExtractedSolution extract_solution(std::string_view transcript);

/// The guided-inference loop. Guidance is appended on its own line after any
/// trailing termination marker is removed. In budget-forcing mode no state
/// drives the injection: the forcing phrase is appended at every termination
/// attempt until the intervention budget runs out.
GenerationSession run_guided_inference(const std::string& problem, Generator& generator,
                                       const ControllerOptions& options = {},
                                       const DetectorRules& rules = {},
                                       const PhraseTable& policy = {});

/// One JSON object per generator step: step, chunk_tokens, terminating,
/// state, technique, injected (null where nothing applies).
void write_session_audit(std::ostream& out, const GenerationSession& session);

}  // namespace hrt

#endif  // HRT_INTERVENTION_CONTROLLER_HPP
