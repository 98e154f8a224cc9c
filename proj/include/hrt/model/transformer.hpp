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

#ifndef HRT_MODEL_TRANSFORMER_HPP
#define HRT_MODEL_TRANSFORMER_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hrt/model/config.hpp"
#include "hrt/numerics/ops.hpp"
#include "hrt/numerics/tensor.hpp"

namespace hrt {

/// Residual bottleneck block A(h) = h + gelu(h W_down) W_up applied to each
/// row of h. No biases. W_up starts at zero so a fresh adapter is the
/// identity.
struct AdapterModule {
  Tensor w_down;  // d x r
  Tensor w_up;    // r x d
  int bottleneck_r = 0;
  AdapterLevel level = AdapterLevel::kStrategic;

  Tensor apply(const Tensor& h) const;
};

struct TransformerBlock {
  Tensor ln1_gain, ln1_bias;
  Tensor w_query, w_key, w_value, w_out;
  Tensor ln2_gain, ln2_bias;
  Tensor w_ff_in, b_ff_in, w_ff_out, b_ff_out;
  std::optional<AdapterModule> after_attention;
  std::optional<AdapterModule> after_ffn;
};

struct NamedParameter {
  std::string name;
  Tensor tensor;
  bool trainable = false;
};

/// Decoder-only transformer: token + learned position embeddings, pre-LN
/// blocks of causal multi-head attention and a GELU FFN, final layer norm,
/// and an output head tied to the token embedding (scaled by 1/sqrt(d)).
class Model {
 public:
  /// Deterministic seeded initialization. Every parameter is trainable until
  /// adapters are inserted.
  static Model build(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }

  /// Causal logits, one row per input position (T x vocab).
  Tensor forward(std::span<const TokenId> tokens) const;

  /// Stable order; names identify tensors in checkpoints.
  std::vector<NamedParameter> parameters() const;
  std::vector<Tensor> trainable_parameters() const;

  bool has_adapters() const { return adapter_r_ > 0; }
  int adapter_r() const { return adapter_r_; }
  AdapterPlan plan() const;

  /// Deep copy: no storage is shared with the original.
  Model clone() const;

  // Direct access for tests and serialization.
  std::vector<TransformerBlock>& blocks() { return blocks_; }
  const std::vector<TransformerBlock>& blocks() const { return blocks_; }
  Tensor& token_embedding() { return token_embedding_; }
  Tensor& position_embedding() { return position_embedding_; }

 private:
  friend Model insert_adapters(const Model&, const AdapterPlan&, int, std::uint64_t);
  friend Model assemble_model(const ModelConfig&, const AdapterPlan&, int,
                              const std::vector<NamedParameter>&);

  Model() = default;
  Tensor attention(const TransformerBlock& block, const Tensor& x) const;

  ModelConfig config_;
  Tensor token_embedding_;
  Tensor position_embedding_;
  std::vector<TransformerBlock> blocks_;
  Tensor final_gain_, final_bias_;
  int adapter_r_ = 0;
};

inline Model build_model(const ModelConfig& config, std::uint64_t seed) {
  return Model::build(config, seed);
}

inline constexpr int kDefaultBottleneck = 64;

/// Copy of `base` with an adapter at every planned point. Base parameters are
/// frozen in the copy; adapter parameters are the only trainable set.
/// W_down ~ N(0, 1/d) from `seed`, W_up = 0. Throws ContractError when
/// r >= d_model or the plan does not fit the model.
Model insert_adapters(const Model& base, const AdapterPlan& plan, int r = kDefaultBottleneck,
                      std::uint64_t seed = 0);

/// Adapter parameters over all parameters of a materialized model; 0 when no
/// adapters are present.
double count_trainable_fraction(const Model& model);

/// Rebuilds a model from named tensors (checkpoint loading). Names must match
/// those produced by Model::parameters() for the given config and plan.
Model assemble_model(const ModelConfig& config, const AdapterPlan& plan, int r,
                     const std::vector<NamedParameter>& tensors);

}  // namespace hrt

#endif  // HRT_MODEL_TRANSFORMER_HPP
