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

// Fixed workloads shared by the CLI and the acceptance suite.

#ifndef HRT_HARNESS_WORKLOADS_HPP
#define HRT_HARNESS_WORKLOADS_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hrt/curation/triplet.hpp"
#include "hrt/harness/config.hpp"
#include "hrt/model/transformer.hpp"
#include "hrt/numerics/gradcheck.hpp"
#include "hrt/objective/trace.hpp"

namespace hrt {

/// default_adapter_plan for L >= 3. Shallower models get every level
/// somewhere: strategic after attention in layer 0, tactical after the FFN
/// in the last layer, operational at the remaining points.
AdapterPlan adapter_plan_for(const ModelConfig& config);

/// Traces over tokens 0..V-1 that follow t -> (3t + 1) mod V. Trace i starts
/// at i mod V and has 12 + i mod 3 tokens: 2 problem, 2 strategic,
/// 3 tactical, the rest operational, 2 answer. Needs V >= 2.
std::vector<ReasoningTrace> make_successor_traces(std::size_t n, int vocab_size);

/// The same sequences as text triplets ("s<t>" words) with level markers in
/// the reasoning, for the CLI train path.
std::vector<Triplet> make_successor_triplets(std::size_t n, int vocab_size);

/// Adapted model from the config (base seed, adapter seed + 1) with every
/// adapter weight redrawn from N(0, 0.25) so no gradient is trivially zero,
/// checked on one random segmented trace.
GradCheckReport run_adapter_gradcheck(const RunConfig& config, std::uint64_t seed,
                                      const GradCheckOptions& options = {});

}  // namespace hrt

#endif  // HRT_HARNESS_WORKLOADS_HPP
