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

// Differentiable operations on Tensor. Every op records itself on the tape
// only when at least one operand requires a gradient.

#ifndef HRT_NUMERICS_OPS_HPP
#define HRT_NUMERICS_OPS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "hrt/numerics/tensor.hpp"

namespace hrt {

using TokenId = std::int32_t;

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor add(const Tensor& a, const Tensor& b);
/// x (m x n) plus a 1 x n row broadcast over every row.
Tensor add_row(const Tensor& x, const Tensor& row);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor sum(const Tensor& a);

/// Exact-erf GELU, element-wise.
Tensor gelu(const Tensor& x);

/// Row-wise layer normalization with affine gain and bias (both 1 x n).
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-5);

/// Gathers rows of a (V x d) table; gradients scatter-add back.
Tensor embedding(const Tensor& table, std::span<const TokenId> ids);
/// The first n rows of x.
Tensor take_rows(const Tensor& x, Index n);

Tensor slice_cols(const Tensor& x, Index begin, Index count);
Tensor concat_cols(const std::vector<Tensor>& parts);

/// Softmax over j <= i in row i of a square score matrix; entries above the
/// diagonal are exactly zero.
Tensor causal_softmax(const Tensor& scores);

/// Mean over unmasked positions t of -log softmax(logits[t])[targets[t]].
/// Throws EmptyMaskError when every position is masked out.
Tensor cross_entropy_nll(const Tensor& logits, std::span<const TokenId> targets,
                         const std::vector<bool>& mask);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator*(double s, const Tensor& a) { return scale(a, s); }

}  // namespace hrt

#endif  // HRT_NUMERICS_OPS_HPP
