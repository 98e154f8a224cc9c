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

#ifndef HRT_CURATION_SYNTHETIC_POOL_HPP
#define HRT_CURATION_SYNTHETIC_POOL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hrt/curation/triplet.hpp"

namespace hrt {

struct SyntheticPoolOptions {
  std::size_t size = 5000;
  std::size_t categories = 5;  // first N rules of the default table
  int max_difficulty = 4;      // difficulty drawn uniformly from 1..max
  double defect_rate = 0.1;    // fraction given one planted quality defect
  std::uint64_t seed = 0;
};

/// Pool with planted ground truth. Every problem reads
/// "... (difficulty D) ... compute A + B." so ThresholdOracle can rig
/// solvability, and uses only keywords of its planted category. The planted
/// category (and defect, if any) is recorded in `source` as
/// "synthetic/<code>" or "synthetic/<code>/defect=<REASON>"; the category
/// field is left empty.
std::vector<Triplet> make_synthetic_pool(const SyntheticPoolOptions& options);

/// Planted category code parsed back from `source`; empty if absent.
std::string planted_category(const Triplet& t);
/// Planted defect reason parsed back from `source`; empty if clean.
std::string planted_defect(const Triplet& t);
/// Planted difficulty parsed from the problem text; 0 if absent.
int planted_difficulty(const Triplet& t);

}  // namespace hrt

#endif  // HRT_CURATION_SYNTHETIC_POOL_HPP
