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

#include "hrt/curation/curate.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "hrt/errors.hpp"
#include "hrt/objective/tokenizer.hpp"
#include "hrt/random.hpp"

namespace hrt {

namespace {

std::set<std::string> word_set(const std::string& text) {
  std::set<std::string> words;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-') {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      words.insert(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) words.insert(cur);
  return words;
}

struct Candidate {
  Triplet triplet;
  std::size_t length = 0;
};

// Longest reasoning first, then id.
bool length_order(const Candidate& a, const Candidate& b) {
  return a.length != b.length ? a.length > b.length : a.triplet.id < b.triplet.id;
}

}  // namespace

const std::vector<CategoryRule>& default_category_rules() {
  static const std::vector<CategoryRule> rules{
      {"05 combinatorics", {"combinations", "permutations", "arrangements", "choose", "ways", "subsets", "coloring"}},
      {"11 number-theory", {"prime", "divisible", "remainder", "modulo", "gcd", "divisors", "digits"}},
      {"12 algebra", {"polynomial", "quadratic", "roots", "equation", "coefficients", "inequality"}},
      {"15 linear-algebra", {"matrix", "vector", "eigenvalue", "determinant", "linear"}},
      {"26 calculus", {"derivative", "integral", "limit", "continuous", "series"}},
      {"51 geometry", {"triangle", "angle", "circle", "polygon", "perimeter", "radius", "area"}},
      {"60 probability", {"probability", "random", "expected", "dice", "coin", "odds"}},
      {"68 computer-science", {"algorithm", "complexity", "program", "runtime", "recursion"}},
      {"70 physics", {"velocity", "force", "energy", "mass", "momentum"}},
      {"92 biology", {"cell", "protein", "gene", "enzyme", "organism"}},
  };
  return rules;
}

KeywordClassifier::KeywordClassifier() : rules_(default_category_rules()) {}

KeywordClassifier::KeywordClassifier(std::vector<CategoryRule> rules) : rules_(std::move(rules)) {}

KeywordClassifier KeywordClassifier::parse(std::istream& in) {
  std::vector<CategoryRule> rules;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw InputError("category rules line " + std::to_string(number) + ": expected code<TAB>keywords");
    }
    CategoryRule rule{line.substr(0, tab), {}};
    std::stringstream kws(line.substr(tab + 1));
    std::string kw;
    while (std::getline(kws, kw, ',')) {
      kw.erase(0, kw.find_first_not_of(" \t"));
      kw.erase(kw.find_last_not_of(" \t\r") + 1);
      if (!kw.empty()) rule.keywords.push_back(kw);
    }
    if (rule.keywords.empty()) {
      throw InputError("category rules line " + std::to_string(number) + ": no keywords");
    }
    rules.push_back(std::move(rule));
  }
  return KeywordClassifier(std::move(rules));
}

KeywordClassifier KeywordClassifier::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse(in);
}

std::string KeywordClassifier::classify(const Triplet& t) const {
  const auto words = word_set(t.problem + "\n" + t.reasoning);
  std::size_t best = 0;
  std::string code = kMiscCategory;
  for (const auto& rule : rules_) {
    std::size_t score = 0;
    for (const auto& kw : rule.keywords) score += words.count(kw);
    if (score > best) {
      best = score;
      code = rule.code;
    }
  }
  return code;
}

CategoryIndex classify_domains(const std::vector<Triplet>& pool,
                               const KeywordClassifier& classifier) {
  CategoryIndex index;
  for (const auto& t : pool) {
    Triplet copy = t;
    if (!copy.category || copy.category->empty()) copy.category = classifier.classify(t);
    index[*copy.category].push_back(std::move(copy));
  }
  return index;
}

SampleResult diversity_sample(const CategoryIndex& index, std::size_t target, std::uint64_t seed,
                              LengthPolicy policy) {
  if (index.empty()) throw ContractError("diversity_sample: empty category index");
  std::vector<std::vector<Candidate>> buckets;
  for (const auto& [code, members] : index) {
    if (members.empty()) continue;
    buckets.emplace_back();
    for (const auto& t : members) buckets.back().push_back({t, count_tokens(t.reasoning)});
    std::sort(buckets.back().begin(), buckets.back().end(), length_order);
  }
  Rng rng(seed);
  SampleResult out;
  while (out.selected.size() < target && !buckets.empty()) {
    const std::size_t b = rng.index(buckets.size());
    auto& bucket = buckets[b];
    std::size_t pick = 0;
    if (policy == LengthPolicy::kLengthWeighted) {
      double total = 0;
      for (const auto& c : bucket) total += static_cast<double>(c.length + 1);
      double u = rng.uniform() * total;
      for (pick = 0; pick + 1 < bucket.size(); ++pick) {
        u -= static_cast<double>(bucket[pick].length + 1);
        if (u < 0) break;
      }
    }
    out.selected.push_back(std::move(bucket[pick].triplet));
    bucket.erase(bucket.begin() + static_cast<std::ptrdiff_t>(pick));
    if (bucket.empty()) buckets.erase(buckets.begin() + static_cast<std::ptrdiff_t>(b));
  }
  out.shortfall = out.selected.size() < target;
  return out;
}

std::string CurationReport::to_json() const {
  nlohmann::ordered_json j;
  j["pool_size"] = pool_size;
  j["after_quality"] = after_quality;
  j["after_difficulty"] = after_difficulty;
  j["selected"] = selected;
  j["shortfall"] = shortfall;
  j["rejections"] = rejections;
  j["available_per_category"] = available_per_category;
  j["selected_per_category"] = selected_per_category;
  j["quality_rules_version"] = kQualityRulesVersion;
  return j.dump();
}

CurationResult curate(const std::vector<Triplet>& pool, const SolverOracle& small,
                      const SolverOracle& large, const CurationOptions& options,
                      const KeywordClassifier& classifier) {
  CurationResult out;
  auto& report = out.report;
  report.pool_size = pool.size();

  auto quality = quality_filter(pool);
  report.after_quality = quality.kept.size();
  for (const auto& [t, issue] : quality.rejected) ++report.rejections[to_string(issue)];

  auto difficulty = difficulty_filter(quality.kept, small, large);
  report.after_difficulty = difficulty.kept.size();
  if (difficulty.solved_by_small) report.rejections["SOLVED_BY_SMALL"] = difficulty.solved_by_small;
  if (difficulty.solved_by_large) report.rejections["SOLVED_BY_LARGE"] = difficulty.solved_by_large;
  report.log = std::move(difficulty.log);

  if (difficulty.kept.empty()) {
    report.shortfall = options.target > 0;
    return out;
  }
  const auto index = classify_domains(difficulty.kept, classifier);
  for (const auto& [code, members] : index) report.available_per_category[code] = members.size();

  auto sample = diversity_sample(index, options.target, options.seed, options.length_policy);
  out.dataset = std::move(sample.selected);
  report.selected = out.dataset.size();
  report.shortfall = sample.shortfall;
  for (const auto& t : out.dataset) ++report.selected_per_category[*t.category];
  return out;
}

}  // namespace hrt
