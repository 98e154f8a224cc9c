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

#ifndef HRT_CURATION_TRIPLET_HPP
#define HRT_CURATION_TRIPLET_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hrt {

/// One problem-reasoning-solution record. Benchmark tasks use the same
/// record: `solution` holds the gold answer and `category` the domain tag.
struct Triplet {
  std::string id;
  std::string problem;
  std::string reasoning;
  std::string solution;
  std::string source;
  std::optional<std::string> category;

  bool operator==(const Triplet&) const = default;
};

/// One JSON object per line with keys id, problem, reasoning, solution,
/// source, category (string or null), in that order. See
/// schema/triplet.schema.json.
std::string to_jsonl_line(const Triplet& t);
Triplet triplet_from_jsonl_line(const std::string& line);

/// Blank lines are skipped. Throws InputError naming the line number for a
/// malformed record, missing id/problem/solution, or a duplicate id.
std::vector<Triplet> read_triplets(std::istream& in);
void write_triplets(std::ostream& out, const std::vector<Triplet>& triplets);

/// File variants; IoError when the file cannot be opened or written.
std::vector<Triplet> load_triplets(const std::filesystem::path& path);
void save_triplets(const std::filesystem::path& path, const std::vector<Triplet>& triplets);

}  // namespace hrt

#endif  // HRT_CURATION_TRIPLET_HPP
