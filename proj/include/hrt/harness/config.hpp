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

#ifndef HRT_HARNESS_CONFIG_HPP
#define HRT_HARNESS_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "hrt/curation/curate.hpp"
#include "hrt/intervention/controller.hpp"
#include "hrt/model/config.hpp"
#include "hrt/objective/train.hpp"

namespace hrt {

inline constexpr const char* kCodeVersion = "hrt-0.1.0";

/// Every tunable the CLI reads from a --config file. The file is flat
/// "key = value" text with '#' comments; keys are listed in the
/// README. Unknown keys are rejected.
struct RunConfig {
  ModelConfig model;
  int bottleneck = 4;  // sized for the default toy model; r = 64 needs d_model > 64
  TrainOptions training;
  SegmentationRule segmentation;
  std::size_t step_cap = 16;
  std::size_t chunk_tokens = 256;
  std::size_t window_tokens = 200;
  ControlMode mode = ControlMode::kGuided;
  std::string forcing_phrase = "Wait";
  std::size_t target = 1000;
  LengthPolicy length_policy = LengthPolicy::kLongestFirst;
  int small_capability = 1;
  int large_capability = 2;

  static RunConfig parse(std::istream& in);
  static RunConfig load(const std::filesystem::path& path);

  /// Sorted "key=value" lines for every key, defaults included.
  std::string canonical() const;
};

ControlMode parse_mode(const std::string& text);  // "gii" | "budget-forcing"
std::string to_string(ControlMode mode);

/// 16 hex digits: FNV-1a over the code version, canonical config, seed and
/// any extra run inputs (such as input file digests).
std::string fingerprint(const RunConfig& config, std::uint64_t seed, const std::string& extra = "");

/// Hex FNV-1a digest of a file's bytes; IoError if unreadable.
std::string file_digest(const std::filesystem::path& path);

}  // namespace hrt

#endif  // HRT_HARNESS_CONFIG_HPP
