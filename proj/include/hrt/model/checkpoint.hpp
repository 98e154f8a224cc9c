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

// Checkpoint container, version 1. All integers little-endian; doubles are
// IEEE-754 binary64 stored as their little-endian bit pattern.
//
//   bytes  field
//   8      magic "HRTCKPT\0"
//   4      u32 format version (1)
//   24     6 x u32: n_layers, d_model, n_heads, d_ff, vocab_size, max_seq_len
//   4      u32 adapter bottleneck r (0 = no adapters)
//   4      u32 plan layer count P (0 or n_layers)
//   2*P    per layer: u8 after_attention, u8 after_ffn
//          (0xFF = none, else AdapterLevel value)
//   4      u32 tensor count N
//   N x    u32 name length, name bytes (UTF-8), u8 trainable,
//          u32 rows, u32 cols, rows*cols f64 in row-major order
//   4      u32 vocabulary entry count W (0 = none)
//   W x    u32 length, bytes
//   8      u64 FNV-1a 64 checksum of every preceding byte

#ifndef HRT_MODEL_CHECKPOINT_HPP
#define HRT_MODEL_CHECKPOINT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hrt/model/transformer.hpp"

namespace hrt {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  Model model;
  std::vector<std::string> vocabulary;  // optional tokenizer table
};

std::vector<std::uint8_t> encode_checkpoint(const Model& model,
                                            const std::vector<std::string>& vocabulary = {});
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

/// Throws IoError on file-system failures and InputError on malformed data.
void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const std::vector<std::string>& vocabulary = {});
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hrt

#endif  // HRT_MODEL_CHECKPOINT_HPP
