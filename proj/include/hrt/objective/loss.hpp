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

#ifndef HRT_OBJECTIVE_LOSS_HPP
#define HRT_OBJECTIVE_LOSS_HPP

#include <array>
#include <cstddef>

#include "hrt/model/transformer.hpp"
#include "hrt/objective/trace.hpp"

namespace hrt {

/// Weights for the answer, strategic, tactical and operational terms.
struct LossWeights {
  double answer = 1.0;
  double strategic = 0.5;
  double tactical = 0.3;
  double operational = 0.2;

  void validate() const;
  std::array<double, 4> as_array() const { return {answer, strategic, tactical, operational}; }
};

struct LossBreakdown {
  Tensor total;
  // Mean NLL per scored token for each term; 0 when the segment is empty.
  double answer = 0, strategic = 0, tactical = 0, operational = 0;
  // Number of scored positions per term.
  std::array<std::size_t, 4> counts{};
};

/// Teacher-forced per-segment masked NLLs from one forward pass over
/// x || strat || tact || op || y. Logit row j-1 scores token j, so the very
/// first token of the sequence is never scored. Terms with an empty segment
/// or a zero weight are left out of the total.
LossBreakdown composite_loss(const Model& model, const ReasoningTrace& trace,
                             const LossWeights& weights = {});

/// Combines already computed mean NLLs (answer, strat, tact, op).
double combine_terms(const LossWeights& weights, const std::array<double, 4>& terms);

}  // namespace hrt

#endif  // HRT_OBJECTIVE_LOSS_HPP
