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

#ifndef HRT_MODEL_CONFIG_HPP
#define HRT_MODEL_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace hrt {

struct ModelConfig {
  int n_layers = 2;
  int d_model = 8;
  int n_heads = 2;
  int d_ff = 16;
  int vocab_size = 11;
  int max_seq_len = 64;

  /// Throws ContractError unless every field is >= 1 and n_heads divides d_model.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

/// Abstraction level an adapter is meant to serve.
enum class AdapterLevel : std::uint8_t { kStrategic = 0, kTactical = 1, kOperational = 2 };

enum class AttachmentPoint : std::uint8_t { kAfterAttention = 0, kAfterFfn = 1 };

std::string_view to_string(AdapterLevel level);
std::string_view to_string(AttachmentPoint point);

struct LayerAdapters {
  std::optional<AdapterLevel> after_attention;
  std::optional<AdapterLevel> after_ffn;
  bool operator==(const LayerAdapters&) const = default;
};

/// One entry per transformer layer. An empty plan (no entries set) means no
/// adapters.
struct AdapterPlan {
  std::vector<LayerAdapters> layers;

  std::size_t adapter_count() const;
  bool operator==(const AdapterPlan&) const = default;
};

/// Thirds with ceiling splits: strategic after attention in [0, ceil(L/3)),
/// tactical after the FFN in [ceil(L/3), ceil(2L/3)), operational at both
/// points in [ceil(2L/3), L). Requires L >= 3.
AdapterPlan default_adapter_plan(const ModelConfig& config);

/// Structural legality for any plan, hand-written or generated: one entry per
/// layer, strategic only after attention, tactical only after the FFN.
void validate_plan(const AdapterPlan& plan, int n_layers);

/// Whether every adapter also sits in the layer zone its level belongs to.
bool plan_respects_zones(const AdapterPlan& plan, int n_layers);

struct ParameterCounts {
  std::int64_t base = 0;
  std::int64_t adapter = 0;

  std::int64_t total() const { return base + adapter; }
  double trainable_fraction() const {
    return total() == 0 ? 0.0 : static_cast<double>(adapter) / static_cast<double>(total());
  }
};

/// Closed-form parameter count for the architecture built by build_model,
/// without allocating anything. Works for configurations far too large to
/// materialize.
ParameterCounts count_parameters(const ModelConfig& config, const AdapterPlan& plan,
                                 int bottleneck_r);

}  // namespace hrt

#endif  // HRT_MODEL_CONFIG_HPP
