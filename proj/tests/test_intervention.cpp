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

#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hrt/errors.hpp"
#include "hrt/intervention/controller.hpp"
#include "hrt/intervention/detector.hpp"
#include "hrt/intervention/generators.hpp"
#include "hrt/random.hpp"

using namespace hrt;

namespace {

const std::string kPartialChunk = "Step 1: set up the sum, more to do.\n</think>";
const std::string kUncertainChunk = "\nSo 3 + 4 = 7. I'm not sure this is right.\nFinal Answer: 7";
const std::string kVerifiedChunk =
    "\nRedo: 3 + 4 = 7.\ncheck: substituting back, 7 - 4 = 3 holds.\nFinal Answer: 7";

class ThrowingGenerator : public Generator {
 public:
  std::string name() const override { return "throwing"; }
  std::string next_chunk(const std::string&, const std::string& transcript) override {
    if (!transcript.empty()) throw std::runtime_error("backend down");
    return "Step 1: start.\n";
  }
};

}  // namespace

// ---------------------------------------------------------------- termination

TEST_CASE("is_terminating") {
  CHECK(is_terminating("work\nFinal Answer: 42"));
  CHECK(is_terminating("work\nfinal answer: 42\n\n"));
  CHECK(is_terminating("thinking done </think>"));
  CHECK_FALSE(is_terminating(""));
  CHECK_FALSE(is_terminating("so we get 3 + 4 ="));
  CHECK_FALSE(is_terminating("Final Answer: 4\nbut wait, reconsider"));
}

// ---------------------------------------------------------------- detector

TEST_CASE("detect_reasoning_state: one example per state") {
  CHECK(detect_reasoning_state("hmm, I'm not sure about the sign.\nx = 4\nFinal Answer: 4").state ==
        ReasoningState::kUncertain);
  CHECK(detect_reasoning_state("x + 2 = 6 so x = 4\nFinal Answer: 4\ncheck: substituting back, 4 + 2 = 6\n</think>")
            .state == ReasoningState::kComplete);
  CHECK(detect_reasoning_state("x + 2 = 6 so x = 4\n</think>").state == ReasoningState::kPartial);
}

TEST_CASE("detect_reasoning_state: rules and priority") {
  // UNVERIFIED: answer present, no verification after the last calculation.
  const auto unverified = detect_reasoning_state("3 + 4 = 7\nFinal Answer: 7");
  CHECK(unverified.state == ReasoningState::kUnverified);
  CHECK(unverified.arithmetic_checked == 1);
  // Verification before a later calculation does not count.
  CHECK(detect_reasoning_state("check: fine\n3 + 4 = 7\nFinal Answer: 7").state ==
        ReasoningState::kUnverified);
  // No calculation at all: any verification phrase suffices.
  CHECK(detect_reasoning_state("The colour is blue, verified by the table.\nFinal Answer: blue").state ==
        ReasoningState::kComplete);
  // False arithmetic in the window reads as a contradiction.
  const auto wrong = detect_reasoning_state("3 + 4 = 8\nverified\nFinal Answer: 8");
  CHECK(wrong.state == ReasoningState::kUncertain);
  // Two different final answers.
  CHECK(detect_reasoning_state("Final Answer: 3\nverified\nFinal Answer: 5").state ==
        ReasoningState::kUncertain);
  // Lines with '=' that cannot be re-evaluated are counted, not judged.
  const auto unchecked = detect_reasoning_state("f(x) = x^2 + 1\nchecking\nFinal Answer: 2");
  CHECK(unchecked.unchecked == 1);
  CHECK(unchecked.state == ReasoningState::kComplete);
  // PARTIAL dominates UNCERTAIN.
  CHECK(detect_reasoning_state("I'm not sure.\n</think>").state == ReasoningState::kPartial);
  // Constraints from the problem must be mentioned.
  const std::string problem = "Find n.\nConstraint: n is odd.\nCondition: n < 10";
  CHECK(detect_reasoning_state("n = 3 since n is odd\nverified\nFinal Answer: 3", {}, problem).state ==
        ReasoningState::kPartial);
  CHECK(detect_reasoning_state("n = 3 since n is odd and n < 10\nverified\nFinal Answer: 3", {}, problem)
            .state == ReasoningState::kComplete);
}

TEST_CASE("detect_reasoning_state: trailing window") {
  std::string filler;
  for (int i = 0; i < 250; ++i) filler += "word ";
  const std::string text = "I'm not sure.\n" + filler + "\n3 + 4 = 7\nverified\nFinal Answer: 7";
  CHECK(detect_reasoning_state(text).state == ReasoningState::kComplete);
  DetectorRules wide;
  wide.window_tokens = 1000;
  CHECK(detect_reasoning_state(text, wide).state == ReasoningState::kUncertain);
  // The window stops at the last injected guidance line.
  DetectorRules guided;
  guided.guidance_lines = {"Let me try a different approach."};
  const std::string after = "I'm not sure.\nFinal Answer: 8\nLet me try a different approach.\n"
                            "3 + 4 = 7\nverified\nFinal Answer: 7";
  CHECK(detect_reasoning_state(after, guided).state == ReasoningState::kComplete);
  CHECK(detect_reasoning_state(after).state == ReasoningState::kUncertain);
}

TEST_CASE("detect_reasoning_state: total on random terminating text") {
  const std::vector<std::string> pieces{"I'm not sure", "3 + 4 = 7", "3 + 4 = 9", "check:",
                                        "Final Answer: 7", "Final Answer: 9", "x = y",
                                        "Constraint: x", "words here", "</think>"};
  Rng rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const std::size_t n = 1 + rng.index(8);
    for (std::size_t i = 0; i < n; ++i) text += pieces[rng.index(pieces.size())] + "\n";
    text += rng.uniform() < 0.5 ? "Final Answer: 7" : "</think>";
    REQUIRE(is_terminating(text));
    const auto a = detect_reasoning_state(text, {}, "Constraint: x");
    const auto b = detect_reasoning_state(text, {}, "Constraint: x");
    CHECK(a.state == b.state);
  }
}

TEST_CASE("rule and phrase files") {
  std::stringstream rules_text("# custom\nwindow_tokens = 50\nuncertainty = perhaps\nuncertainty = unclear\n");
  const auto rules = DetectorRules::parse(rules_text);
  CHECK(rules.window_tokens == 50);
  CHECK(rules.uncertainty_phrases == std::vector<std::string>{"perhaps", "unclear"});
  CHECK(rules.verification_phrases == DetectorRules{}.verification_phrases);
  std::stringstream bad("window_tokens = -3\n");
  CHECK_THROWS_AS(DetectorRules::parse(bad), InputError);
  std::stringstream unknown("colour = red\n");
  CHECK_THROWS_AS(DetectorRules::parse(unknown), InputError);

  std::stringstream phrases("redirection = Try again differently.\n");
  const auto table = PhraseTable::parse(phrases);
  CHECK(table.redirection == std::vector<std::string>{"Try again differently."});
  CHECK(table.extension == PhraseTable{}.extension);
  CHECK_THROWS_AS(PhraseTable::load("/nonexistent/policy.txt"), IoError);
}

// ---------------------------------------------------------------- guidance

TEST_CASE("guidance_for: defaults and round robin") {
  const PhraseTable p;
  CHECK(guidance_for(ReasoningState::kPartial, p) == "Wait, let me think further.");
  CHECK(guidance_for(ReasoningState::kUncertain, p) == "Let me try a different approach.");
  CHECK(guidance_for(ReasoningState::kUnverified, p) == "Let me verify this solution.");
  CHECK(guidance_for(ReasoningState::kUncertain, p, 1) == "Alternatively, let's try a different approach.");
  CHECK(guidance_for(ReasoningState::kUnverified, p, 1) == "Let me double-check my work.");
  CHECK(guidance_for(ReasoningState::kUncertain, p, 2) == "Let me try a different approach.");
  CHECK_THROWS_AS(guidance_for(ReasoningState::kComplete, p), ContractError);
}

// ---------------------------------------------------------------- controller

TEST_CASE("run_guided_inference: three-chunk replay") {
  ScriptedGenerator gen({kPartialChunk, kUncertainChunk, kVerifiedChunk});
  const auto s = run_guided_inference("What is 3 + 4?", gen, {.step_cap = 3});
  CHECK(gen.calls() == 3);
  REQUIRE(s.events.size() == 2);
  CHECK(s.events[0].injected_text == "Wait, let me think further.");
  CHECK(s.events[0].technique == Technique::kExtension);
  CHECK(s.events[0].step == 1);
  CHECK(s.events[1].injected_text == "Let me try a different approach.");
  CHECK(s.events[1].technique == Technique::kRedirection);
  CHECK(s.completed);
  CHECK(s.final_state == ReasoningState::kComplete);
  CHECK_FALSE(s.budget_exhausted);
  CHECK(s.solution == "7");
  CHECK(s.classifications == std::vector<ReasoningState>{ReasoningState::kPartial,
                                                          ReasoningState::kUncertain,
                                                          ReasoningState::kComplete});
  // The injected lines appear in the transcript in order, and nothing else was added.
  const std::string expected = "Step 1: set up the sum, more to do.\nWait, let me think further.\n" +
                               kUncertainChunk + "\nLet me try a different approach.\n" + kVerifiedChunk;
  CHECK(s.transcript == expected);
  CHECK(s.transcript.find("</think>") == std::string::npos);

  ScriptedGenerator again({kPartialChunk, kUncertainChunk, kVerifiedChunk});
  CHECK(run_guided_inference("What is 3 + 4?", again, {.step_cap = 3}).transcript == s.transcript);
}

TEST_CASE("run_guided_inference: budget edges") {
  ScriptedGenerator once({kVerifiedChunk});
  const auto s1 = run_guided_inference("q", once, {.step_cap = 1});
  CHECK(s1.events.empty());
  CHECK(s1.completed);
  CHECK(s1.transcript == kVerifiedChunk);  // COMPLETE is never modified

  for (std::size_t T : {1u, 5u, 17u}) {
    ScriptedGenerator never({"still going "}, true);
    const auto s = run_guided_inference("q", never, {.step_cap = T});
    CHECK(never.calls() == T);
    CHECK(s.step == T);
    CHECK(s.budget_exhausted);
    CHECK(s.no_answer);
    CHECK(s.events.empty());
  }
  ScriptedGenerator partial({kPartialChunk}, true);
  const auto s2 = run_guided_inference("q", partial, {.step_cap = 4});
  CHECK(partial.calls() == 4);
  CHECK(s2.budget_exhausted);
  CHECK(s2.events.size() == 4);

  ScriptedGenerator g({"x"});
  CHECK_THROWS_AS(run_guided_inference("q", g, {.step_cap = 0}), ContractError);
}

TEST_CASE("run_guided_inference: intervention cap") {
  ScriptedGenerator gen({kPartialChunk}, true);
  const auto s = run_guided_inference("q", gen, {.step_cap = 10, .max_interventions = 2});
  CHECK(s.events.size() == 2);
  CHECK(gen.calls() == 3);
  CHECK(s.intervention_cap_reached);
  CHECK_FALSE(s.budget_exhausted);

  ScriptedGenerator zero({kUncertainChunk});
  const auto z = run_guided_inference("q", zero, {.step_cap = 10, .max_interventions = 0});
  CHECK(z.events.empty());
  CHECK(z.solution == "7");
  CHECK(z.final_state == ReasoningState::kUncertain);
}

TEST_CASE("run_guided_inference: generator failure keeps the partial transcript") {
  ThrowingGenerator gen;
  const auto s = run_guided_inference("q", gen, {.step_cap = 5});
  CHECK(s.error);
  CHECK(s.error_message == "backend down");
  CHECK(s.transcript == "Step 1: start.\n");
  CHECK(s.step == 1);
  CHECK_FALSE(s.budget_exhausted);
}

TEST_CASE("run_guided_inference: invariants over random scripts") {
  const std::vector<std::string> chunks{kPartialChunk, kUncertainChunk, kVerifiedChunk,
                                        "more words ", "3 + 4 = 7\nFinal Answer: 7"};
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> script;
    for (std::size_t i = 0; i < 1 + rng.index(6); ++i) script.push_back(chunks[rng.index(chunks.size())]);
    std::size_t previous_length = 0;
    for (std::size_t T = 1; T <= 8; ++T) {
      ScriptedGenerator gen(script, true);
      const auto s = run_guided_inference("q", gen, {.step_cap = T});
      CHECK(gen.calls() <= T);
      std::size_t non_complete = 0;
      for (auto c : s.classifications) non_complete += c != ReasoningState::kComplete;
      CHECK(s.events.size() == non_complete);
      for (std::size_t i = 1; i < s.events.size(); ++i) CHECK(s.events[i - 1].step < s.events[i].step);
      const auto all = PhraseTable{}.all();
      for (const auto& e : s.events) {
        CHECK(std::find(all.begin(), all.end(), e.injected_text) != all.end());
      }
      CHECK(s.transcript.size() >= previous_length);
      previous_length = s.transcript.size();
      ScriptedGenerator replay(script, true);
      CHECK(run_guided_inference("q", replay, {.step_cap = T}).transcript == s.transcript);
    }
  }
}

TEST_CASE("budget forcing appends the forcing phrase regardless of state") {
  ScriptedGenerator gen({kVerifiedChunk}, true);
  const auto s = run_guided_inference(
      "q", gen, {.step_cap = 10, .max_interventions = 2, .mode = ControlMode::kBudgetForcing});
  CHECK(gen.calls() == 3);
  REQUIRE(s.events.size() == 2);
  CHECK(s.events[0].injected_text == "Wait");
  CHECK(s.events[0].detected_state == ReasoningState::kComplete);
  CHECK(s.classifications.empty());
}

TEST_CASE("extract_solution") {
  CHECK(extract_solution("...Final Answer: 204").answer == "204");
  CHECK(extract_solution("Final Answer: 10\n...\nFinal Answer: 12").answer == "12");
  const auto none = extract_solution("");
  CHECK(none.answer.empty());
  CHECK(none.no_answer);
  CHECK(extract_solution("no declaration").no_answer);
}

TEST_CASE("session audit records") {
  ScriptedGenerator gen({kPartialChunk, "more ", kVerifiedChunk});
  const auto s = run_guided_inference("q", gen, {.step_cap = 5});
  std::ostringstream out;
  write_session_audit(out, s);
  std::istringstream in(out.str());
  std::vector<nlohmann::json> rows;
  for (std::string line; std::getline(in, line);) rows.push_back(nlohmann::json::parse(line));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0]["step"] == 1);
  CHECK(rows[0]["state"] == "PARTIAL");
  CHECK(rows[0]["technique"] == "EXTENSION");
  CHECK(rows[0]["injected"] == "Wait, let me think further.");
  CHECK(rows[1]["terminating"] == false);
  CHECK(rows[1]["state"].is_null());
  CHECK(rows[1]["chunk_tokens"] == 1);
  CHECK(rows[2]["state"] == "COMPLETE");
  CHECK(rows[2]["injected"].is_null());
}

// ---------------------------------------------------------------- generators

TEST_CASE("synthetic reasoner profiles") {
  SyntheticReasoner r;
  const auto suite = make_thinking_suite(6, 5, 1);
  for (std::size_t i = 0; i < suite.size(); ++i) {
    for (std::size_t budget = 0; budget <= 6; ++budget) {
      const auto s = run_guided_inference(suite[i].problem, r, {.step_cap = 16, .max_interventions = budget});
      CHECK((s.solution == suite[i].solution) == (budget >= i));
    }
  }
  const auto red = make_redirection_suite(2, 1, 2);
  const auto gii = run_guided_inference(red[0].problem, r, {.step_cap = 16, .max_interventions = 3});
  CHECK(gii.solution == red[0].solution);
  REQUIRE_FALSE(gii.events.empty());
  CHECK(gii.events[0].technique == Technique::kRedirection);
  const auto bf = run_guided_inference(red[0].problem, r,
                                       {.step_cap = 16, .max_interventions = 3, .mode = ControlMode::kBudgetForcing});
  CHECK(bf.solution != red[0].solution);
  CHECK(bf.events.size() == 3);

  Triplet verify = red[1];
  verify.problem = "Task 9: compute 10 + 20. [script verify]";
  const auto v = run_guided_inference(verify.problem, r, {.step_cap = 16});
  REQUIRE(v.events.size() == 1);
  CHECK(v.events[0].technique == Technique::kVerification);
  CHECK(v.solution == "30");

  const auto fixed = make_fixed_suite(3, 1, 3);
  CHECK(run_guided_inference(fixed[0].problem, r).solution == fixed[0].solution);
  const auto w = run_guided_inference(fixed[1].problem, r);
  CHECK(w.completed);
  CHECK(w.solution != fixed[1].solution);

  CHECK_THROWS_AS(r.next_chunk("no script", ""), InputError);
}

TEST_CASE("model generator decodes greedily and stops at the stop word") {
  ModelConfig c;
  c.n_layers = 2;
  c.d_model = 8;
  c.n_heads = 2;
  c.d_ff = 16;
  c.vocab_size = 4;
  c.max_seq_len = 8;
  const Model m = build_model(c, 5);
  const Tokenizer tok({"<unk>", "a", "b", "</think>"});
  ModelGenerator gen(m, tok, 20);
  const std::string chunk = gen.next_chunk("a b", "");
  const auto words = split_words(chunk);
  CHECK_FALSE(words.empty());
  CHECK(words.size() <= 20);
  for (std::size_t i = 0; i + 1 < words.size(); ++i) CHECK(words[i] != "</think>");
  CHECK(gen.next_chunk("a b", "") == chunk);
  CHECK_THROWS_AS(ModelGenerator(m, Tokenizer({"<unk>", "a"})), ContractError);
}
