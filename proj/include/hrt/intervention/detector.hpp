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

#ifndef HRT_INTERVENTION_DETECTOR_HPP
#define HRT_INTERVENTION_DETECTOR_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace hrt {

enum class ReasoningState { kComplete, kPartial, kUncertain, kUnverified };
enum class Technique { kExtension, kRedirection, kVerification };

std::string to_string(ReasoningState s);
std::string to_string(Technique t);

/// Pattern table for the detector. Phrase matching is case-insensitive.
struct DetectorRules {
  std::size_t window_tokens = 200;
  std::vector<std::string> termination_markers{"</think>"};
  std::vector<std::string> uncertainty_phrases{"i'm not sure", "i am not sure", "this might be",
                                               "not confident", "i'm unsure", "might be wrong"};
  std::vector<std::string> verification_phrases{"check:", "checking", "substituting back",
                                                "verified", "verify", "verification",
                                                "double-check", "confirms"};
  // Problem lines starting with one of these state a constraint; the rest of
  // the line must then appear somewhere in the transcript.
  std::vector<std::string> constraint_prefixes{"constraint:", "condition:"};
  // Injected guidance lines. The trailing window never reaches back past
  // the last one, so symptoms already answered by guidance do not linger.
  std::vector<std::string> guidance_lines;

  /// "key = value" lines; '#' comments. List keys (termination, uncertainty,
  /// verification, constraint_prefix) may repeat; the first occurrence in a
  /// file replaces the default list. Scalar key: window_tokens.
  static DetectorRules parse(std::istream& in);
  static DetectorRules load(const std::filesystem::path& path);
};

/// True iff the transcript ends with a termination marker or its last
/// non-blank line declares a final answer.
bool is_terminating(std::string_view transcript, const DetectorRules& rules = {});

struct Detection {
  ReasoningState state = ReasoningState::kComplete;
  std::vector<std::string> reasons;
  std::size_t arithmetic_checked = 0;  // equalities re-evaluated in the window
  std::size_t unchecked = 0;           // '=' lines too complex to re-evaluate
};

/// PARTIAL > UNCERTAIN > UNVERIFIED > COMPLETE.
///  PARTIAL: no final answer in the window, or a problem constraint never
///    mentioned in the transcript.
///  UNCERTAIN: an uncertainty phrase in the window, two different final
///    answers in the window, or a false arithmetic equality in the window.
///  UNVERIFIED: no verification phrase after the last calculation line.
Detection detect_reasoning_state(std::string_view transcript, const DetectorRules& rules = {},
                                 std::string_view problem = {});

/// Guidance phrases per technique, used round-robin.
struct PhraseTable {
  std::vector<std::string> extension{"Wait, let me think further."};
  std::vector<std::string> redirection{"Let me try a different approach.",
                                       "Alternatively, let's try a different approach."};
  std::vector<std::string> verification{"Let me verify this solution.",
                                        "Let me double-check my work."};

  const std::vector<std::string>& phrases(Technique t) const;
  std::vector<std::string> all() const;

  /// "extension = ...", "redirection = ...", "verification = ..." lines;
  /// first occurrence of a key replaces its default list.
  static PhraseTable parse(std::istream& in);
  static PhraseTable load(const std::filesystem::path& path);
};

Technique technique_for(ReasoningState state);

/// The `use`-th phrase (0-based) for the state's technique, cycling through
/// the list. ContractError for COMPLETE or an empty list.
std::string guidance_for(ReasoningState state, const PhraseTable& policy, std::size_t use = 0);

}  // namespace hrt

#endif  // HRT_INTERVENTION_DETECTOR_HPP
