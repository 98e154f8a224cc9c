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

#include "hrt/curation/triplet.hpp"

#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <unordered_set>

#include "hrt/errors.hpp"

namespace hrt {

namespace {

std::string optional_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return {};
  if (!j.at(key).is_string()) throw InputError(std::string("field '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

std::string required_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw InputError(std::string("missing string field '") + key + "'");
  }
  auto value = j.at(key).get<std::string>();
  if (value.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw InputError(std::string("field '") + key + "' is empty");
  }
  return value;
}

}  // namespace

std::string to_jsonl_line(const Triplet& t) {
  nlohmann::ordered_json j;
  j["id"] = t.id;
  j["problem"] = t.problem;
  j["reasoning"] = t.reasoning;
  j["solution"] = t.solution;
  j["source"] = t.source;
  j["category"] = t.category ? nlohmann::ordered_json(*t.category) : nlohmann::ordered_json(nullptr);
  return j.dump();
}

Triplet triplet_from_jsonl_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("record is not a JSON object");
  Triplet t;
  t.id = required_string(j, "id");
  // Problem and solution may not be blank, but quality filtering is where
  // that is reported for pools, so only require presence here.
  if (!j.contains("problem") || !j.at("problem").is_string()) {
    throw InputError("missing string field 'problem'");
  }
  if (!j.contains("solution") || !j.at("solution").is_string()) {
    throw InputError("missing string field 'solution'");
  }
  t.problem = j.at("problem").get<std::string>();
  t.solution = j.at("solution").get<std::string>();
  t.reasoning = optional_string(j, "reasoning");
  t.source = optional_string(j, "source");
  if (j.contains("category") && !j.at("category").is_null()) {
    t.category = optional_string(j, "category");
  }
  return t;
}

std::vector<Triplet> read_triplets(std::istream& in) {
  std::vector<Triplet> out;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(triplet_from_jsonl_line(line));
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(number) + ": " + e.what());
    }
    if (!ids.insert(out.back().id).second) {
      throw InputError("line " + std::to_string(number) + ": duplicate id '" + out.back().id + "'");
    }
  }
  return out;
}

void write_triplets(std::ostream& out, const std::vector<Triplet>& triplets) {
  for (const auto& t : triplets) out << to_jsonl_line(t) << '\n';
}

std::vector<Triplet> load_triplets(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_triplets(in);
}

void save_triplets(const std::filesystem::path& path, const std::vector<Triplet>& triplets) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  write_triplets(out, triplets);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace hrt
