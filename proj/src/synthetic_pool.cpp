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

#include "hrt/curation/synthetic_pool.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>

#include "hrt/curation/curate.hpp"
#include "hrt/errors.hpp"
#include "hrt/random.hpp"

namespace hrt {

namespace {

const char* const kFiller[] = {"we", "note", "that", "the", "value", "follows", "from", "setup",
                               "so", "next", "consider", "term", "carefully", "then", "add"};

std::string pick_keywords(Rng& rng, const CategoryRule& rule) {
  // Three distinct keywords from the rule, in rule order.
  std::vector<std::size_t> idx(rule.keywords.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
  idx.resize(std::min<std::size_t>(3, idx.size()));
  std::sort(idx.begin(), idx.end());
  std::string out;
  for (auto i : idx) out += (out.empty() ? "" : " and ") + rule.keywords[i];
  return out;
}

}  // namespace

std::vector<Triplet> make_synthetic_pool(const SyntheticPoolOptions& options) {
  const auto& rules = default_category_rules();
  if (options.categories == 0 || options.categories > rules.size()) {
    throw ContractError("synthetic pool: categories must be in [1, " + std::to_string(rules.size()) + "]");
  }
  if (options.max_difficulty < 1) throw ContractError("synthetic pool: max_difficulty must be >= 1");
  if (options.defect_rate < 0 || options.defect_rate > 1) {
    throw ContractError("synthetic pool: defect_rate must be in [0, 1]");
  }
  static const char* const kDefects[] = {"EMPTY_REASONING", "UNBALANCED_MATH", "TRUNCATED",
                                         "STEP_MARKER_INCONSISTENT", "CONTRADICTORY_ANSWER"};
  Rng rng(options.seed);
  std::vector<Triplet> pool;
  pool.reserve(options.size);
  for (std::size_t i = 0; i < options.size; ++i) {
    const auto& rule = rules[rng.index(options.categories)];
    const int difficulty = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(options.max_difficulty)));
    const long long a = 1 + static_cast<long long>(rng.index(900));
    const long long b = 1 + static_cast<long long>(rng.index(900));
    const std::string answer = std::to_string(a + b);

    Triplet t;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%06zu", i);
    t.id = id;
    t.problem = "Item " + std::to_string(i) + " (difficulty " + std::to_string(difficulty) +
                ") about " + pick_keywords(rng, rule) + ": compute " + std::to_string(a) + " + " +
                std::to_string(b) + ".";
    const std::size_t steps = 2 + rng.index(10);
    for (std::size_t s = 1; s <= steps; ++s) {
      t.reasoning += "Step " + std::to_string(s) + ":";
      const std::size_t words = 3 + rng.index(12);
      for (std::size_t w = 0; w < words; ++w) t.reasoning += std::string(" ") + kFiller[rng.index(std::size(kFiller))];
      t.reasoning += ".\n";
    }
    t.reasoning += "So \\(" + std::to_string(a) + " + " + std::to_string(b) + " = " + answer +
                   "\\).\nFinal Answer: " + answer;
    t.solution = answer;
    t.source = "synthetic/" + rule.code;

    if (rng.uniform() < options.defect_rate) {
      const std::string defect = kDefects[rng.index(std::size(kDefects))];
      if (defect == "EMPTY_REASONING") {
        t.reasoning.clear();
      } else if (defect == "UNBALANCED_MATH") {
        t.reasoning.insert(0, "Let \\( x be the total.\n");
      } else if (defect == "TRUNCATED") {
        t.reasoning = t.reasoning.substr(0, t.reasoning.find("So \\(")) + "and then ...";
      } else if (defect == "STEP_MARKER_INCONSISTENT") {
        t.reasoning += "\nStep " + std::to_string(steps + 2) + ": recheck.";
      } else {
        t.reasoning += "\nFinal Answer: " + std::to_string(a + b + 7);
      }
      t.source += "/defect=" + defect;
    }
    pool.push_back(std::move(t));
  }
  return pool;
}

std::string planted_category(const Triplet& t) {
  constexpr std::string_view prefix = "synthetic/";
  if (t.source.rfind(prefix, 0) != 0) return {};
  const auto rest = t.source.substr(prefix.size());
  return rest.substr(0, rest.find('/'));
}

std::string planted_defect(const Triplet& t) {
  const auto at = t.source.find("/defect=");
  return at == std::string::npos ? std::string() : t.source.substr(at + 8);
}

int planted_difficulty(const Triplet& t) {
  static const std::regex d(R"(\(difficulty (\d+)\))");
  std::smatch m;
  return std::regex_search(t.problem, m, d) ? std::stoi(m[1].str()) : 0;
}

}  // namespace hrt
