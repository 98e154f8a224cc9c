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

#include "hrt/objective/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hrt/errors.hpp"

namespace hrt {

void LossWeights::validate() const {
  bool any = false;
  for (double w : as_array()) {
    if (!(w >= 0) || !std::isfinite(w)) throw ContractError("loss weights must be finite and >= 0");
    any = any || w > 0;
  }
  if (!any) throw ContractError("at least one loss weight must be positive");
}

double combine_terms(const LossWeights& weights, const std::array<double, 4>& terms) {
  const auto w = weights.as_array();
  double total = 0;
  for (std::size_t k = 0; k < 4; ++k) total += w[k] * terms[k];
  return total;
}

LossBreakdown composite_loss(const Model& model, const ReasoningTrace& trace,
                             const LossWeights& weights) {
  weights.validate();
  if (trace.answer.empty()) throw ContractError("composite_loss: empty answer segment");
  const auto seq = trace.concatenated();
  if (seq.size() < 2) throw ContractError("composite_loss: answer has no preceding context");
  if (seq.size() > static_cast<std::size_t>(model.config().max_seq_len)) {
    throw InputError("composite_loss: trace of " + std::to_string(seq.size()) +
                     " tokens exceeds max_seq_len " + std::to_string(model.config().max_seq_len));
  }

  const std::span<const TokenId> all(seq);
  const std::size_t n = seq.size();
  const Tensor logits = model.forward(all.first(n - 1));
  const auto targets = all.subspan(1);

  // Segment k covers sequence positions [begin[k], begin[k+1]).
  const std::size_t x = trace.problem.size();
  const std::array<std::size_t, 5> bounds{
      x + trace.strategic.size() + trace.tactical.size() + trace.operational.size(),  // answer
      x, x + trace.strategic.size(), x + trace.strategic.size() + trace.tactical.size(), n};
  const std::array<std::pair<std::size_t, std::size_t>, 4> spans{
      std::pair{bounds[0], n}, std::pair{bounds[1], bounds[2]}, std::pair{bounds[2], bounds[3]},
      std::pair{bounds[3], bounds[0]}};

  LossBreakdown out;
  const auto w = weights.as_array();
  std::array<double*, 4> values{&out.answer, &out.strategic, &out.tactical, &out.operational};
  std::vector<Tensor> parts;
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<bool> mask(n - 1, false);
    std::size_t count = 0;
    for (std::size_t pos = std::max<std::size_t>(spans[k].first, 1); pos < spans[k].second; ++pos) {
      mask[pos - 1] = true;
      ++count;
    }
    out.counts[k] = count;
    if (count == 0) {
      if (k == 0) throw ContractError("composite_loss: answer has no scorable token");
      continue;
    }
    Tensor term = cross_entropy_nll(logits, targets, mask);
    *values[k] = term.item();
    if (w[k] > 0) parts.push_back(w[k] == 1.0 ? term : scale(term, w[k]));
  }
  if (parts.empty()) throw ContractError("composite_loss: no weighted term has scored tokens");
  Tensor total = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) total = add(total, parts[i]);
  out.total = total;
  return out;
}

}  // namespace hrt
