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

#include "hrt/harness/workloads.hpp"

#include <algorithm>
#include <string>

#include "hrt/errors.hpp"
#include "hrt/objective/loss.hpp"
#include "hrt/random.hpp"

namespace hrt {

namespace {

std::vector<TokenId> successor_sequence(std::size_t i, int v) {
  std::vector<TokenId> seq;
  auto t = static_cast<TokenId>(i % static_cast<std::size_t>(v));
  const std::size_t n = 12 + i % 3;
  for (std::size_t k = 0; k < n; ++k) {
    seq.push_back(t);
    t = (3 * t + 1) % v;
  }
  return seq;
}

std::string words(const std::vector<TokenId>& seq, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t k = from; k < to; ++k) {
    if (!out.empty()) out += ' ';
    out += "s" + std::to_string(seq[k]);
  }
  return out;
}

}  // namespace

AdapterPlan adapter_plan_for(const ModelConfig& config) {
  if (config.n_layers >= 3) return default_adapter_plan(config);
  AdapterPlan plan;
  plan.layers.resize(static_cast<std::size_t>(config.n_layers));
  plan.layers.front().after_attention = AdapterLevel::kStrategic;
  plan.layers.back().after_ffn = AdapterLevel::kTactical;
  if (config.n_layers == 2) {
    plan.layers[0].after_ffn = AdapterLevel::kOperational;
    plan.layers[1].after_attention = AdapterLevel::kOperational;
  }
  return plan;
}

std::vector<ReasoningTrace> make_successor_traces(std::size_t n, int vocab_size) {
  if (vocab_size < 2) throw ContractError("successor traces need vocab_size >= 2");
  std::vector<ReasoningTrace> data;
  for (std::size_t i = 0; i < n; ++i) {
    const auto seq = successor_sequence(i, vocab_size);
    ReasoningTrace tr;
    tr.problem.assign(seq.begin(), seq.begin() + 2);
    tr.strategic.assign(seq.begin() + 2, seq.begin() + 4);
    tr.tactical.assign(seq.begin() + 4, seq.begin() + 7);
    tr.operational.assign(seq.begin() + 7, seq.end() - 2);
    tr.answer.assign(seq.end() - 2, seq.end());
    data.push_back(std::move(tr));
  }
  return data;
}

std::vector<Triplet> make_successor_triplets(std::size_t n, int vocab_size) {
  if (vocab_size < 2) throw ContractError("successor traces need vocab_size >= 2");
  std::vector<Triplet> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto seq = successor_sequence(i, vocab_size);
    const std::size_t m = seq.size();
    Triplet t;
    t.id = "trace-" + std::to_string(i);
    t.problem = words(seq, 0, 2);
    t.reasoning = "[STRATEGIC]\n" + words(seq, 2, 4) + "\n[TACTICAL]\n" + words(seq, 4, 7) +
                  "\n[OPERATIONAL]\n" + words(seq, 7, m - 2);
    t.solution = words(seq, m - 2, m);
    t.source = "synthetic/successor";
    t.category = "sequence";
    out.push_back(std::move(t));
  }
  return out;
}

GradCheckReport run_adapter_gradcheck(const RunConfig& config, std::uint64_t seed,
                                      const GradCheckOptions& options) {
  Model model = insert_adapters(build_model(config.model, seed), adapter_plan_for(config.model),
                                config.bottleneck, seed + 1);
  Rng rng(seed + 2);
  for (auto& p : model.parameters()) {
    if (!p.trainable) continue;
    Matrix& v = p.tensor.mutable_value();
    for (Index i = 0; i < v.size(); ++i) v.data()[i] = 0.5 * rng.normal();
  }
  const auto vocab = static_cast<std::uint64_t>(config.model.vocab_size);
  const auto draw = [&](std::size_t n) {
    std::vector<TokenId> ids(n);
    for (auto& id : ids) id = static_cast<TokenId>(rng.index(vocab));
    return ids;
  };
  const std::size_t room = static_cast<std::size_t>(config.model.max_seq_len);
  if (room < 5) throw ContractError("gradcheck needs max_seq_len >= 5");
  ReasoningTrace trace;
  const std::size_t each = std::min<std::size_t>(3, room / 5);
  trace.problem = draw(each);
  trace.strategic = draw(each);
  trace.tactical = draw(each);
  trace.operational = draw(each);
  trace.answer = draw(each);
  const LossWeights weights = config.training.weights;
  return check_gradients([&] { return composite_loss(model, trace, weights).total; },
                         model.trainable_parameters(), options);
}

}  // namespace hrt
