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

#include "hrt/intervention/detector.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <regex>
#include <set>

#include "hrt/answer.hpp"
#include "hrt/errors.hpp"
#include "hrt/objective/tokenizer.hpp"

namespace hrt {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(a, b - a + 1));
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    out.emplace_back(text.substr(start, nl - start));
    if (nl == text.size()) break;
    start = nl + 1;
  }
  return out;
}

bool contains_any(const std::string& low_text, const std::vector<std::string>& phrases) {
  return std::any_of(phrases.begin(), phrases.end(),
                     [&](const std::string& p) { return low_text.find(lower(p)) != std::string::npos; });
}

// Start offset of the trailing window: the last `tokens` words, cut at the
// end of the last guidance line if that comes later.
std::size_t window_start(std::string_view text, const DetectorRules& rules) {
  std::size_t start = 0;
  std::size_t seen = 0;
  std::size_t i = text.size();
  while (i > 0 && seen < rules.window_tokens) {
    while (i > 0 && std::isspace(static_cast<unsigned char>(text[i - 1]))) --i;
    if (i == 0) break;
    while (i > 0 && !std::isspace(static_cast<unsigned char>(text[i - 1]))) --i;
    ++seen;
    start = i;
  }
  if (seen < rules.window_tokens) start = 0;
  std::size_t offset = 0;
  for (const auto& line : lines_of(text)) {
    const std::string t = trim(line);
    for (const auto& g : rules.guidance_lines) {
      if (!t.empty() && t == trim(g)) start = std::max(start, offset + line.size());
    }
    offset += line.size() + 1;
  }
  return std::min(start, text.size());
}

bool is_declaration_line(const std::string& line) {
  return !find_answer_declarations(line).empty();
}

struct ArithmeticScan {
  std::size_t checked = 0;
  std::size_t unchecked = 0;
  bool any_false = false;
};

ArithmeticScan scan_arithmetic(const std::vector<std::string>& lines) {
  static const std::regex eq(
      R"((-?\d+(?:\.\d+)?)\s*([-+*/x])\s*(-?\d+(?:\.\d+)?)\s*=\s*(-?\d+(?:\.\d+)?))");
  ArithmeticScan scan;
  for (const auto& line : lines) {
    if (line.find('=') == std::string::npos) continue;
    bool matched = false;
    for (auto it = std::sregex_iterator(line.begin(), line.end(), eq); it != std::sregex_iterator(); ++it) {
      matched = true;
      const double a = std::stod((*it)[1].str());
      const double b = std::stod((*it)[3].str());
      const double c = std::stod((*it)[4].str());
      const std::string op = (*it)[2].str();
      double v = 0;
      if (op == "+") v = a + b;
      else if (op == "-") v = a - b;
      else if (op == "/") v = b == 0 ? NAN : a / b;
      else v = a * b;
      ++scan.checked;
      if (!(std::abs(v - c) <= 1e-9 * std::max(1.0, std::abs(c)))) scan.any_false = true;
    }
    if (!matched) ++scan.unchecked;
  }
  return scan;
}

void parse_key_values(std::istream& in, const std::string& what,
                      const std::function<void(const std::string&, const std::string&)>& apply) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InputError(what + " line " + std::to_string(number) + ": expected key = value");
    }
    try {
      apply(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const InputError& e) {
      throw InputError(what + " line " + std::to_string(number) + ": " + e.what());
    }
  }
}

}  // namespace

std::string to_string(ReasoningState s) {
  switch (s) {
    case ReasoningState::kComplete: return "COMPLETE";
    case ReasoningState::kPartial: return "PARTIAL";
    case ReasoningState::kUncertain: return "UNCERTAIN";
    case ReasoningState::kUnverified: return "UNVERIFIED";
  }
  return "UNKNOWN";
}

std::string to_string(Technique t) {
  switch (t) {
    case Technique::kExtension: return "EXTENSION";
    case Technique::kRedirection: return "REDIRECTION";
    case Technique::kVerification: return "VERIFICATION";
  }
  return "UNKNOWN";
}

DetectorRules DetectorRules::parse(std::istream& in) {
  DetectorRules rules;
  std::set<std::string> replaced;
  const std::map<std::string, std::vector<std::string>*> lists{
      {"termination", &rules.termination_markers},
      {"uncertainty", &rules.uncertainty_phrases},
      {"verification", &rules.verification_phrases},
      {"constraint_prefix", &rules.constraint_prefixes}};
  parse_key_values(in, "detector rules", [&](const std::string& key, const std::string& value) {
    if (key == "window_tokens") {
      std::size_t used = 0;
      long long n = 0;
      try {
        n = std::stoll(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != value.size() || n < 1) throw InputError("window_tokens must be a positive integer");
      rules.window_tokens = static_cast<std::size_t>(n);
      return;
    }
    auto it = lists.find(key);
    if (it == lists.end()) throw InputError("unknown key '" + key + "'");
    if (value.empty()) throw InputError("empty value for '" + key + "'");
    if (replaced.insert(key).second) it->second->clear();
    it->second->push_back(value);
  });
  return rules;
}

DetectorRules DetectorRules::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse(in);
}

bool is_terminating(std::string_view transcript, const DetectorRules& rules) {
  const std::string t = trim(transcript);
  if (t.empty()) return false;
  for (const auto& m : rules.termination_markers) {
    if (!m.empty() && t.ends_with(m)) return true;
  }
  const auto last_nl = t.rfind('\n');
  const std::string last = last_nl == std::string::npos ? t : t.substr(last_nl + 1);
  return is_declaration_line(last);
}

Detection detect_reasoning_state(std::string_view transcript, const DetectorRules& rules,
                                 std::string_view problem) {
  Detection d;
  const std::string_view window = transcript.substr(window_start(transcript, rules));
  const auto lines = lines_of(window);
  const std::string low_window = lower(window);

  // PARTIAL
  const auto decls = find_answer_declarations(window);
  bool partial = false;
  if (decls.empty()) {
    partial = true;
    d.reasons.push_back("no final answer declaration");
  }
  const std::string low_transcript = lower(transcript);
  for (const auto& line : lines_of(problem)) {
    const std::string low = lower(trim(line));
    for (const auto& prefix : rules.constraint_prefixes) {
      const std::string p = lower(prefix);
      if (low.rfind(p, 0) != 0) continue;
      std::string needle = trim(low.substr(p.size()));
      while (!needle.empty() && needle.back() == '.') needle.pop_back();
      if (!needle.empty() && low_transcript.find(needle) == std::string::npos) {
        partial = true;
        d.reasons.push_back("constraint not addressed: " + needle);
      }
    }
  }

  // UNCERTAIN
  bool uncertain = false;
  if (contains_any(low_window, rules.uncertainty_phrases)) {
    uncertain = true;
    d.reasons.push_back("uncertainty phrase");
  }
  std::set<std::string> answers;
  for (const auto& decl : decls) {
    const auto n = normalize_answer(decl.payload);
    if (!n.empty()) answers.insert(n);
  }
  if (answers.size() > 1) {
    uncertain = true;
    d.reasons.push_back("conflicting final answers");
  }
  std::vector<std::string> calc_lines;
  std::vector<std::size_t> calc_index;
  std::ptrdiff_t last_calc = -1;
  std::ptrdiff_t last_verify = -1;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string low = lower(lines[i]);
    const bool verifies = contains_any(low, rules.verification_phrases);
    if (verifies) last_verify = static_cast<std::ptrdiff_t>(i);
    if (lines[i].find('=') != std::string::npos) {
      calc_lines.push_back(lines[i]);
      if (!verifies && !is_declaration_line(lines[i])) last_calc = static_cast<std::ptrdiff_t>(i);
    }
  }
  const auto scan = scan_arithmetic(calc_lines);
  d.arithmetic_checked = scan.checked;
  d.unchecked = scan.unchecked;
  if (scan.any_false) {
    uncertain = true;
    d.reasons.push_back("false arithmetic equality");
  }

  // UNVERIFIED
  const bool verified = last_verify > last_calc;
  if (!verified) d.reasons.push_back("no verification after last calculation");

  if (partial) d.state = ReasoningState::kPartial;
  else if (uncertain) d.state = ReasoningState::kUncertain;
  else if (!verified) d.state = ReasoningState::kUnverified;
  else d.state = ReasoningState::kComplete;
  return d;
}

const std::vector<std::string>& PhraseTable::phrases(Technique t) const {
  switch (t) {
    case Technique::kExtension: return extension;
    case Technique::kRedirection: return redirection;
    case Technique::kVerification: return verification;
  }
  return extension;
}

std::vector<std::string> PhraseTable::all() const {
  std::vector<std::string> out = extension;
  out.insert(out.end(), redirection.begin(), redirection.end());
  out.insert(out.end(), verification.begin(), verification.end());
  return out;
}

PhraseTable PhraseTable::parse(std::istream& in) {
  PhraseTable table;
  std::set<std::string> replaced;
  const std::map<std::string, std::vector<std::string>*> lists{
      {"extension", &table.extension},
      {"redirection", &table.redirection},
      {"verification", &table.verification}};
  parse_key_values(in, "phrase table", [&](const std::string& key, const std::string& value) {
    auto it = lists.find(key);
    if (it == lists.end()) throw InputError("unknown key '" + key + "'");
    if (value.empty()) throw InputError("empty phrase for '" + key + "'");
    if (replaced.insert(key).second) it->second->clear();
    it->second->push_back(value);
  });
  return table;
}

PhraseTable PhraseTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse(in);
}

Technique technique_for(ReasoningState state) {
  switch (state) {
    case ReasoningState::kPartial: return Technique::kExtension;
    case ReasoningState::kUncertain: return Technique::kRedirection;
    case ReasoningState::kUnverified: return Technique::kVerification;
    case ReasoningState::kComplete: break;
  }
  throw ContractError("no guidance for a COMPLETE reasoning state");
}

std::string guidance_for(ReasoningState state, const PhraseTable& policy, std::size_t use) {
  const auto& list = policy.phrases(technique_for(state));
  if (list.empty()) throw ContractError("phrase list for " + to_string(technique_for(state)) + " is empty");
  return list[use % list.size()];
}

}  // namespace hrt
