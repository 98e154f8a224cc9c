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

#ifndef HRT_CURATION_CURATE_HPP
#define HRT_CURATION_CURATE_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hrt/curation/filters.hpp"
#include "hrt/curation/triplet.hpp"

namespace hrt {

inline constexpr const char* kMiscCategory = "misc";

/// A category code and the words that vote for it.
struct CategoryRule {
  std::string code;
  std::vector<std::string> keywords;
};

/// Scores each rule by the number of its distinct keywords found as whole
/// words (case-insensitive) in problem + reasoning; the best score wins,
/// ties go to the earlier rule, no hit gives "misc".
class KeywordClassifier {
 public:
  KeywordClassifier();  // built-in table, same as data/category_rules.txt
  explicit KeywordClassifier(std::vector<CategoryRule> rules);

  /// Lines "code<TAB>kw1,kw2,...", '#' comments. InputError on bad lines.
  static KeywordClassifier parse(std::istream& in);
  static KeywordClassifier load(const std::filesystem::path& path);

  std::string classify(const Triplet& t) const;
  const std::vector<CategoryRule>& rules() const { return rules_; }

 private:
  std::vector<CategoryRule> rules_;
};

const std::vector<CategoryRule>& default_category_rules();

/// Category code -> members in input order.
using CategoryIndex = std::map<std::string, std::vector<Triplet>>;

/// Pre-set categories pass through; the rest are classified.
CategoryIndex classify_domains(const std::vector<Triplet>& pool,
                               const KeywordClassifier& classifier = {});

enum class LengthPolicy {
  kLongestFirst,    // deterministic: longest reasoning first, ties by id
  kLengthWeighted,  // random draw with probability proportional to length + 1
};

struct SampleResult {
  std::vector<Triplet> selected;
  bool shortfall = false;
};

/// Repeatedly picks a category uniformly among non-empty ones and takes one
/// triplet from it until `target` are chosen or everything is used.
SampleResult diversity_sample(const CategoryIndex& index, std::size_t target, std::uint64_t seed,
                              LengthPolicy policy = LengthPolicy::kLongestFirst);

struct CurationOptions {
  std::size_t target = 1000;
  std::uint64_t seed = 0;
  LengthPolicy length_policy = LengthPolicy::kLongestFirst;
};

struct CurationReport {
  std::size_t pool_size = 0;
  std::size_t after_quality = 0;
  std::size_t after_difficulty = 0;
  std::size_t selected = 0;
  bool shortfall = false;
  std::map<std::string, std::size_t> rejections;  // reason -> count
  std::map<std::string, std::size_t> available_per_category;
  std::map<std::string, std::size_t> selected_per_category;
  std::vector<std::string> log;

  /// Single JSON object.
  std::string to_json() const;
};

struct CurationResult {
  std::vector<Triplet> dataset;
  CurationReport report;
};

/// quality -> difficulty -> classify -> diversity.
CurationResult curate(const std::vector<Triplet>& pool, const SolverOracle& small,
                      const SolverOracle& large, const CurationOptions& options = {},
                      const KeywordClassifier& classifier = {});

}  // namespace hrt

#endif  // HRT_CURATION_CURATE_HPP
