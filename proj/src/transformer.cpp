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

#include "hrt/model/transformer.hpp"

#include <cmath>
#include <map>

#include "hrt/errors.hpp"
#include "hrt/random.hpp"

namespace hrt {

namespace {

Tensor normal_tensor(Rng& rng, Index rows, Index cols, double stddev) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = stddev * rng.normal();
  }
  return Tensor(std::move(m), true);
}

Tensor ones_row(Index n) { return Tensor(Matrix::Ones(1, n), true); }
Tensor zeros_row(Index n) { return Tensor(Matrix::Zero(1, n), true); }

std::optional<AdapterModule> clone_adapter(const std::optional<AdapterModule>& a) {
  if (!a) return std::nullopt;
  AdapterModule copy = *a;
  copy.w_down = a->w_down.clone();
  copy.w_up = a->w_up.clone();
  return copy;
}

std::string block_prefix(std::size_t i) { return "blocks." + std::to_string(i) + "."; }

}  // namespace

Tensor AdapterModule::apply(const Tensor& h) const {
  return add(h, matmul(gelu(matmul(h, w_down)), w_up));
}

Model Model::build(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const Index d = config.d_model;
  const Index ff = config.d_ff;
  const double d_scale = 1.0 / std::sqrt(static_cast<double>(d));
  const double ff_scale = 1.0 / std::sqrt(static_cast<double>(ff));

  Model m;
  m.config_ = config;
  m.token_embedding_ = normal_tensor(rng, config.vocab_size, d, 1.0);
  m.position_embedding_ = normal_tensor(rng, config.max_seq_len, d, 0.1);
  m.blocks_.resize(static_cast<std::size_t>(config.n_layers));
  for (auto& b : m.blocks_) {
    b.ln1_gain = ones_row(d);
    b.ln1_bias = zeros_row(d);
    b.w_query = normal_tensor(rng, d, d, d_scale);
    b.w_key = normal_tensor(rng, d, d, d_scale);
    b.w_value = normal_tensor(rng, d, d, d_scale);
    b.w_out = normal_tensor(rng, d, d, d_scale);
    b.ln2_gain = ones_row(d);
    b.ln2_bias = zeros_row(d);
    b.w_ff_in = normal_tensor(rng, d, ff, d_scale);
    b.b_ff_in = zeros_row(ff);
    b.w_ff_out = normal_tensor(rng, ff, d, ff_scale);
    b.b_ff_out = zeros_row(d);
  }
  m.final_gain_ = ones_row(d);
  m.final_bias_ = zeros_row(d);
  return m;
}

Tensor Model::attention(const TransformerBlock& block, const Tensor& x) const {
  const Index head_dim = config_.d_model / config_.n_heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim));
  const Tensor q = matmul(x, block.w_query);
  const Tensor k = matmul(x, block.w_key);
  const Tensor v = matmul(x, block.w_value);
  std::vector<Tensor> heads;
  heads.reserve(static_cast<std::size_t>(config_.n_heads));
  for (int h = 0; h < config_.n_heads; ++h) {
    const Index begin = h * head_dim;
    const Tensor qh = slice_cols(q, begin, head_dim);
    const Tensor kh = slice_cols(k, begin, head_dim);
    const Tensor vh = slice_cols(v, begin, head_dim);
    const Tensor probs = causal_softmax(scale(matmul(qh, transpose(kh)), inv_sqrt));
    heads.push_back(matmul(probs, vh));
  }
  const Tensor merged = heads.size() == 1 ? heads.front() : concat_cols(heads);
  return matmul(merged, block.w_out);
}

Tensor Model::forward(std::span<const TokenId> tokens) const {
  if (tokens.empty()) throw InputError("forward: empty token sequence");
  if (tokens.size() > static_cast<std::size_t>(config_.max_seq_len)) {
    throw InputError("forward: sequence of " + std::to_string(tokens.size()) +
                     " tokens exceeds max_seq_len " + std::to_string(config_.max_seq_len));
  }
  const auto steps = static_cast<Index>(tokens.size());
  Tensor x = add(embedding(token_embedding_, tokens), take_rows(position_embedding_, steps));
  for (const auto& block : blocks_) {
    x = add(x, attention(block, layer_norm(x, block.ln1_gain, block.ln1_bias)));
    if (block.after_attention) x = block.after_attention->apply(x);
    const Tensor hidden =
        gelu(add_row(matmul(layer_norm(x, block.ln2_gain, block.ln2_bias), block.w_ff_in),
                     block.b_ff_in));
    x = add(x, add_row(matmul(hidden, block.w_ff_out), block.b_ff_out));
    if (block.after_ffn) x = block.after_ffn->apply(x);
  }
  const Tensor normed = layer_norm(x, final_gain_, final_bias_);
  const double head_scale = 1.0 / std::sqrt(static_cast<double>(config_.d_model));
  return scale(matmul(normed, transpose(token_embedding_)), head_scale);
}

std::vector<NamedParameter> Model::parameters() const {
  std::vector<NamedParameter> out;
  auto push = [&out](std::string name, const Tensor& t) {
    out.push_back({std::move(name), t, t.requires_grad()});
  };
  push("token_embedding", token_embedding_);
  push("position_embedding", position_embedding_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& b = blocks_[i];
    const std::string p = block_prefix(i);
    push(p + "ln1.gain", b.ln1_gain);
    push(p + "ln1.bias", b.ln1_bias);
    push(p + "attn.query", b.w_query);
    push(p + "attn.key", b.w_key);
    push(p + "attn.value", b.w_value);
    push(p + "attn.out", b.w_out);
    push(p + "ln2.gain", b.ln2_gain);
    push(p + "ln2.bias", b.ln2_bias);
    push(p + "ffn.in.weight", b.w_ff_in);
    push(p + "ffn.in.bias", b.b_ff_in);
    push(p + "ffn.out.weight", b.w_ff_out);
    push(p + "ffn.out.bias", b.b_ff_out);
    if (b.after_attention) {
      push(p + "adapter.after_attention.down", b.after_attention->w_down);
      push(p + "adapter.after_attention.up", b.after_attention->w_up);
    }
    if (b.after_ffn) {
      push(p + "adapter.after_ffn.down", b.after_ffn->w_down);
      push(p + "adapter.after_ffn.up", b.after_ffn->w_up);
    }
  }
  push("final_ln.gain", final_gain_);
  push("final_ln.bias", final_bias_);
  return out;
}

std::vector<Tensor> Model::trainable_parameters() const {
  std::vector<Tensor> out;
  for (auto& p : parameters()) {
    if (p.trainable) out.push_back(p.tensor);
  }
  return out;
}

AdapterPlan Model::plan() const {
  AdapterPlan plan;
  if (!has_adapters()) return plan;
  for (const auto& b : blocks_) {
    LayerAdapters layer;
    if (b.after_attention) layer.after_attention = b.after_attention->level;
    if (b.after_ffn) layer.after_ffn = b.after_ffn->level;
    plan.layers.push_back(layer);
  }
  return plan;
}

Model Model::clone() const {
  Model m;
  m.config_ = config_;
  m.adapter_r_ = adapter_r_;
  m.token_embedding_ = token_embedding_.clone();
  m.position_embedding_ = position_embedding_.clone();
  m.final_gain_ = final_gain_.clone();
  m.final_bias_ = final_bias_.clone();
  m.blocks_.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    TransformerBlock c;
    c.ln1_gain = b.ln1_gain.clone();
    c.ln1_bias = b.ln1_bias.clone();
    c.w_query = b.w_query.clone();
    c.w_key = b.w_key.clone();
    c.w_value = b.w_value.clone();
    c.w_out = b.w_out.clone();
    c.ln2_gain = b.ln2_gain.clone();
    c.ln2_bias = b.ln2_bias.clone();
    c.w_ff_in = b.w_ff_in.clone();
    c.b_ff_in = b.b_ff_in.clone();
    c.w_ff_out = b.w_ff_out.clone();
    c.b_ff_out = b.b_ff_out.clone();
    c.after_attention = clone_adapter(b.after_attention);
    c.after_ffn = clone_adapter(b.after_ffn);
    m.blocks_.push_back(std::move(c));
  }
  return m;
}

Model insert_adapters(const Model& base, const AdapterPlan& plan, int r, std::uint64_t seed) {
  const ModelConfig& cfg = base.config();
  if (r < 1 || r >= cfg.d_model) {
    throw ContractError("adapter bottleneck r=" + std::to_string(r) +
                        " must satisfy 1 <= r < d_model=" + std::to_string(cfg.d_model));
  }
  if (base.has_adapters()) throw ContractError("insert_adapters: model already has adapters");
  validate_plan(plan, cfg.n_layers);

  Model m = base.clone();
  for (auto& p : m.parameters()) p.tensor.set_requires_grad(false);

  Rng rng(seed);
  const double down_scale = 1.0 / std::sqrt(static_cast<double>(cfg.d_model));
  auto make = [&](AdapterLevel level) {
    AdapterModule a;
    a.level = level;
    a.bottleneck_r = r;
    a.w_down = normal_tensor(rng, cfg.d_model, r, down_scale);
    a.w_up = Tensor(Matrix::Zero(r, cfg.d_model), true);
    return a;
  };
  for (std::size_t i = 0; i < plan.layers.size(); ++i) {
    if (plan.layers[i].after_attention) {
      m.blocks_[i].after_attention = make(*plan.layers[i].after_attention);
    }
    if (plan.layers[i].after_ffn) m.blocks_[i].after_ffn = make(*plan.layers[i].after_ffn);
  }
  m.adapter_r_ = plan.adapter_count() > 0 ? r : 0;
  return m;
}

double count_trainable_fraction(const Model& model) {
  std::int64_t adapter = 0;
  std::int64_t total = 0;
  for (const auto& p : model.parameters()) {
    total += p.tensor.size();
    if (p.name.find(".adapter.") != std::string::npos) adapter += p.tensor.size();
  }
  return total == 0 ? 0.0 : static_cast<double>(adapter) / static_cast<double>(total);
}

Model assemble_model(const ModelConfig& config, const AdapterPlan& plan, int r,
                     const std::vector<NamedParameter>& tensors) {
  std::map<std::string, const NamedParameter*> by_name;
  for (const auto& t : tensors) by_name[t.name] = &t;

  Model base = Model::build(config, 0);
  Model m = plan.adapter_count() > 0 ? insert_adapters(base, plan, r, 0) : std::move(base);
  std::size_t used = 0;
  for (auto& p : m.parameters()) {
    auto it = by_name.find(p.name);
    if (it == by_name.end()) throw InputError("missing parameter '" + p.name + "'");
    const Matrix& src = it->second->tensor.value();
    if (src.rows() != p.tensor.rows() || src.cols() != p.tensor.cols()) {
      throw InputError("parameter '" + p.name + "' has shape " +
                       it->second->tensor.shape_string() + ", expected " +
                       p.tensor.shape_string());
    }
    p.tensor.mutable_value() = src;
    p.tensor.set_requires_grad(it->second->trainable);
    ++used;
  }
  if (used != tensors.size()) throw InputError("unexpected extra parameters in checkpoint");
  return m;
}

}  // namespace hrt
