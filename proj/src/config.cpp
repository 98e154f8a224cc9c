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

#include "hrt/model/config.hpp"

#include <string>

#include "hrt/errors.hpp"

namespace hrt {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

struct Zones {
  int tactical_begin;
  int operational_begin;
};

Zones zones_for(int n_layers) {
  return {ceil_div(n_layers, 3), ceil_div(2 * n_layers, 3)};
}

}  // namespace

void ModelConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ContractError("invalid model config: " + msg);
  };
  require(n_layers >= 1, "n_layers must be >= 1");
  require(d_model >= 1, "d_model must be >= 1");
  require(n_heads >= 1, "n_heads must be >= 1");
  require(d_ff >= 1, "d_ff must be >= 1");
  require(vocab_size >= 1, "vocab_size must be >= 1");
  require(max_seq_len >= 1, "max_seq_len must be >= 1");
  require(d_model % n_heads == 0, "n_heads (" + std::to_string(n_heads) +
                                      ") must divide d_model (" + std::to_string(d_model) + ")");
}

std::string_view to_string(AdapterLevel level) {
  switch (level) {
    case AdapterLevel::kStrategic: return "STRATEGIC";
    case AdapterLevel::kTactical: return "TACTICAL";
    case AdapterLevel::kOperational: return "OPERATIONAL";
  }
  return "?";
}

std::string_view to_string(AttachmentPoint point) {
  switch (point) {
    case AttachmentPoint::kAfterAttention: return "AFTER_ATTENTION";
    case AttachmentPoint::kAfterFfn: return "AFTER_FFN";
  }
  return "?";
}

std::size_t AdapterPlan::adapter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) {
    n += layer.after_attention.has_value() ? 1 : 0;
    n += layer.after_ffn.has_value() ? 1 : 0;
  }
  return n;
}

AdapterPlan default_adapter_plan(const ModelConfig& config) {
  config.validate();
  if (config.n_layers < 3) {
    throw ContractError("default_adapter_plan needs at least 3 layers (got " +
                        std::to_string(config.n_layers) +
                        "); pass an explicit AdapterPlan for shallower models");
  }
  const Zones z = zones_for(config.n_layers);
  AdapterPlan plan;
  plan.layers.resize(static_cast<std::size_t>(config.n_layers));
  for (int i = 0; i < config.n_layers; ++i) {
    auto& layer = plan.layers[static_cast<std::size_t>(i)];
    if (i < z.tactical_begin) {
      layer.after_attention = AdapterLevel::kStrategic;
    } else if (i < z.operational_begin) {
      layer.after_ffn = AdapterLevel::kTactical;
    } else {
      layer.after_attention = AdapterLevel::kOperational;
      layer.after_ffn = AdapterLevel::kOperational;
    }
  }
  return plan;
}

void validate_plan(const AdapterPlan& plan, int n_layers) {
  if (plan.layers.size() != static_cast<std::size_t>(n_layers)) {
    throw ContractError("adapter plan covers " + std::to_string(plan.layers.size()) +
                        " layers but the model has " + std::to_string(n_layers));
  }
  for (std::size_t i = 0; i < plan.layers.size(); ++i) {
    const auto& layer = plan.layers[i];
    if (layer.after_attention == AdapterLevel::kTactical) {
      throw ContractError("layer " + std::to_string(i) +
                          ": tactical adapters attach after the FFN only");
    }
    if (layer.after_ffn == AdapterLevel::kStrategic) {
      throw ContractError("layer " + std::to_string(i) +
                          ": strategic adapters attach after attention only");
    }
  }
}

bool plan_respects_zones(const AdapterPlan& plan, int n_layers) {
  if (plan.layers.size() != static_cast<std::size_t>(n_layers)) return false;
  const Zones z = zones_for(n_layers);
  auto zone_ok = [&](int layer, AdapterLevel level) {
    switch (level) {
      case AdapterLevel::kStrategic: return layer < z.tactical_begin;
      case AdapterLevel::kTactical:
        return layer >= z.tactical_begin && layer < z.operational_begin;
      case AdapterLevel::kOperational: return layer >= z.operational_begin;
    }
    return false;
  };
  for (int i = 0; i < n_layers; ++i) {
    const auto& layer = plan.layers[static_cast<std::size_t>(i)];
    if (layer.after_attention) {
      if (*layer.after_attention == AdapterLevel::kTactical) return false;
      if (!zone_ok(i, *layer.after_attention)) return false;
    }
    if (layer.after_ffn) {
      if (*layer.after_ffn == AdapterLevel::kStrategic) return false;
      if (!zone_ok(i, *layer.after_ffn)) return false;
    }
  }
  return true;
}

ParameterCounts count_parameters(const ModelConfig& config, const AdapterPlan& plan,
                                 int bottleneck_r) {
  config.validate();
  const std::int64_t d = config.d_model;
  const std::int64_t ff = config.d_ff;
  // Two layer norms (gain + bias), four d x d attention projections, FFN
  // weights plus biases.
  const std::int64_t per_layer = 4 * d + 4 * d * d + 2 * d * ff + ff + d;
  ParameterCounts counts;
  counts.base = static_cast<std::int64_t>(config.vocab_size) * d +
                static_cast<std::int64_t>(config.max_seq_len) * d +
                static_cast<std::int64_t>(config.n_layers) * per_layer + 2 * d;
  if (plan.adapter_count() > 0) {
    validate_plan(plan, config.n_layers);
    counts.adapter = static_cast<std::int64_t>(plan.adapter_count()) * 2 * d * bottleneck_r;
  }
  return counts;
}

}  // namespace hrt
