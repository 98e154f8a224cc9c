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

#include "hrt/numerics/ops.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "hrt/errors.hpp"
#include "hrt/numerics/kernels.hpp"

namespace hrt {

namespace {

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                         b.shape_string());
  }
}

detail::Node& input(detail::Node& self, std::size_t i) { return *self.inputs[i]; }

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions differ: " + a.shape_string() + " x " +
                         b.shape_string());
  }
  Matrix out(a.rows(), b.cols());
  out.noalias() = a.value() * b.value();
  return Tensor::from_op(std::move(out), {a, b}, [](detail::Node& self) {
    detail::Node& lhs = input(self, 0);
    detail::Node& rhs = input(self, 1);
    if (lhs.requires_grad) lhs.accumulate(self.grad * rhs.value.transpose());
    if (rhs.requires_grad) rhs.accumulate(lhs.value.transpose() * self.grad);
  });
}

Tensor transpose(const Tensor& a) {
  return Tensor::from_op(a.value().transpose(), {a}, [](detail::Node& self) {
    input(self, 0).accumulate(self.grad.transpose());
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  return Tensor::from_op(a.value() + b.value(), {a, b}, [](detail::Node& self) {
    input(self, 0).accumulate(self.grad);
    input(self, 1).accumulate(self.grad);
  });
}

Tensor add_row(const Tensor& x, const Tensor& row) {
  if (row.rows() != 1 || row.cols() != x.cols()) {
    throw DimensionError("add_row: expected 1x" + std::to_string(x.cols()) + " row, got " +
                         row.shape_string());
  }
  Matrix out = x.value();
  out.rowwise() += row.value().row(0);
  return Tensor::from_op(std::move(out), {x, row}, [](detail::Node& self) {
    input(self, 0).accumulate(self.grad);
    input(self, 1).accumulate(self.grad.colwise().sum());
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  Matrix out = a.value().cwiseProduct(b.value());
  return Tensor::from_op(std::move(out), {a, b}, [](detail::Node& self) {
    detail::Node& lhs = input(self, 0);
    detail::Node& rhs = input(self, 1);
    if (lhs.requires_grad) lhs.accumulate(self.grad.cwiseProduct(rhs.value));
    if (rhs.requires_grad) rhs.accumulate(self.grad.cwiseProduct(lhs.value));
  });
}

Tensor scale(const Tensor& a, double factor) {
  return Tensor::from_op(a.value() * factor, {a}, [factor](detail::Node& self) {
    input(self, 0).accumulate(self.grad * factor);
  });
}

Tensor sum(const Tensor& a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  const Index rows = a.rows();
  const Index cols = a.cols();
  return Tensor::from_op(std::move(out), {a}, [rows, cols](detail::Node& self) {
    input(self, 0).accumulate(Matrix::Constant(rows, cols, self.grad(0, 0)));
  });
}

Tensor gelu(const Tensor& x) {
  Matrix out = kernels::gelu(x.value());
  return Tensor::from_op(std::move(out), {x}, [](detail::Node& self) {
    detail::Node& in = input(self, 0);
    in.accumulate(self.grad.cwiseProduct(Matrix(kernels::gelu_derivative(in.value))));
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  const Index n = x.cols();
  if (gain.rows() != 1 || gain.cols() != n || bias.rows() != 1 || bias.cols() != n) {
    throw DimensionError("layer_norm: gain " + gain.shape_string() + " / bias " +
                         bias.shape_string() + " do not match input " + x.shape_string());
  }
  Matrix normalized(x.rows(), n);
  Eigen::VectorXd inv_std(x.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    const double mean = x.value().row(i).mean();
    const auto centered = (x.value().row(i).array() - mean).eval();
    const double var = centered.square().mean();
    inv_std(i) = 1.0 / std::sqrt(var + eps);
    normalized.row(i) = centered * inv_std(i);
  }
  Matrix out = normalized;
  out.array().rowwise() *= gain.value().row(0).array();
  out.rowwise() += bias.value().row(0);
  return Tensor::from_op(
      std::move(out), {x, gain, bias},
      [normalized = std::move(normalized), inv_std = std::move(inv_std)](detail::Node& self) {
        detail::Node& in = input(self, 0);
        detail::Node& g = input(self, 1);
        detail::Node& b = input(self, 2);
        if (g.requires_grad) g.accumulate(self.grad.cwiseProduct(normalized).colwise().sum());
        if (b.requires_grad) b.accumulate(self.grad.colwise().sum());
        if (!in.requires_grad) return;
        Matrix dnorm = self.grad;
        dnorm.array().rowwise() *= g.value.row(0).array();
        Matrix dx(dnorm.rows(), dnorm.cols());
        for (Index i = 0; i < dnorm.rows(); ++i) {
          const double mean_d = dnorm.row(i).mean();
          const double mean_dn = dnorm.row(i).cwiseProduct(normalized.row(i)).mean();
          dx.row(i) = inv_std(i) * (dnorm.row(i).array() - mean_d -
                                    normalized.row(i).array() * mean_dn);
        }
        in.accumulate(dx);
      });
}

Tensor embedding(const Tensor& table, std::span<const TokenId> ids) {
  if (ids.empty()) throw InputError("embedding: empty id sequence");
  Matrix out(static_cast<Index>(ids.size()), table.cols());
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] < 0 || ids[t] >= table.rows()) {
      throw InputError("embedding: token id " + std::to_string(ids[t]) +
                       " outside vocabulary of size " + std::to_string(table.rows()));
    }
    out.row(static_cast<Index>(t)) = table.value().row(ids[t]);
  }
  std::vector<TokenId> captured(ids.begin(), ids.end());
  return Tensor::from_op(std::move(out), {table},
                         [captured = std::move(captured)](detail::Node& self) {
                           detail::Node& tab = input(self, 0);
                           Matrix g = Matrix::Zero(tab.value.rows(), tab.value.cols());
                           for (std::size_t t = 0; t < captured.size(); ++t) {
                             g.row(captured[t]) += self.grad.row(static_cast<Index>(t));
                           }
                           tab.accumulate(g);
                         });
}

Tensor take_rows(const Tensor& x, Index n) {
  if (n <= 0 || n > x.rows()) {
    throw DimensionError("take_rows: " + std::to_string(n) + " rows from " + x.shape_string());
  }
  const Index rows = x.rows();
  return Tensor::from_op(x.value().topRows(n), {x}, [rows](detail::Node& self) {
    Matrix g = Matrix::Zero(rows, self.grad.cols());
    g.topRows(self.grad.rows()) = self.grad;
    input(self, 0).accumulate(g);
  });
}

Tensor slice_cols(const Tensor& x, Index begin, Index count) {
  if (begin < 0 || count <= 0 || begin + count > x.cols()) {
    throw DimensionError("slice_cols: [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") out of " + x.shape_string());
  }
  const Index cols = x.cols();
  return Tensor::from_op(x.value().middleCols(begin, count), {x},
                         [begin, count, cols](detail::Node& self) {
                           Matrix g = Matrix::Zero(self.grad.rows(), cols);
                           g.middleCols(begin, count) = self.grad;
                           input(self, 0).accumulate(g);
                         });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no inputs");
  Index total = 0;
  for (const auto& p : parts) {
    if (p.rows() != parts.front().rows()) {
      throw DimensionError("concat_cols: row counts differ: " + parts.front().shape_string() +
                           " vs " + p.shape_string());
    }
    total += p.cols();
  }
  Matrix out(parts.front().rows(), total);
  std::vector<Index> widths;
  Index offset = 0;
  for (const auto& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    widths.push_back(p.cols());
    offset += p.cols();
  }
  return Tensor::from_op(std::move(out), parts, [widths = std::move(widths)](detail::Node& self) {
    Index at = 0;
    for (std::size_t i = 0; i < widths.size(); ++i) {
      input(self, i).accumulate(self.grad.middleCols(at, widths[i]));
      at += widths[i];
    }
  });
}

Tensor causal_softmax(const Tensor& scores) {
  if (scores.rows() != scores.cols()) {
    throw DimensionError("causal_softmax: expected square scores, got " + scores.shape_string());
  }
  const Index n = scores.rows();
  Matrix probs = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto row = scores.value().row(i).head(i + 1);
    const double peak = row.maxCoeff();
    const auto e = (row.array() - peak).exp().eval();
    probs.row(i).head(i + 1) = e / e.sum();
  }
  return Tensor::from_op(probs, {scores}, [](detail::Node& self) {
    const Matrix& p = self.value;
    Matrix g(p.rows(), p.cols());
    for (Index i = 0; i < p.rows(); ++i) {
      const double dot = p.row(i).dot(self.grad.row(i));
      g.row(i) = p.row(i).array() * (self.grad.row(i).array() - dot);
    }
    input(self, 0).accumulate(g);
  });
}

Tensor cross_entropy_nll(const Tensor& logits, std::span<const TokenId> targets,
                         const std::vector<bool>& mask) {
  const auto steps = static_cast<std::size_t>(logits.rows());
  if (targets.size() != steps || mask.size() != steps) {
    throw DimensionError("cross_entropy_nll: logits " + logits.shape_string() + " with " +
                         std::to_string(targets.size()) + " targets and " +
                         std::to_string(mask.size()) + " mask entries");
  }
  std::size_t active = 0;
  for (std::size_t t = 0; t < steps; ++t) {
    if (!mask[t]) continue;
    if (targets[t] < 0 || targets[t] >= logits.cols()) {
      throw InputError("cross_entropy_nll: target id " + std::to_string(targets[t]) +
                       " outside vocabulary of size " + std::to_string(logits.cols()));
    }
    ++active;
  }
  if (active == 0) throw EmptyMaskError("cross_entropy_nll: every position is masked out");

  Matrix log_probs = kernels::log_softmax_rows(logits.value());
  double total = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    if (mask[t]) total -= log_probs(static_cast<Index>(t), targets[t]);
  }
  const double inv = 1.0 / static_cast<double>(active);
  std::vector<TokenId> tgt(targets.begin(), targets.end());
  return Tensor::from_op(
      Matrix::Constant(1, 1, total * inv), {logits},
      [log_probs = std::move(log_probs), tgt = std::move(tgt), mask, inv](detail::Node& self) {
        const double upstream = self.grad(0, 0) * inv;
        Matrix g = Matrix::Zero(log_probs.rows(), log_probs.cols());
        for (std::size_t t = 0; t < tgt.size(); ++t) {
          if (!mask[t]) continue;
          const auto row = static_cast<Index>(t);
          g.row(row) = log_probs.row(row).array().exp() * upstream;
          g(row, tgt[t]) -= upstream;
        }
        input(self, 0).accumulate(g);
      });
}

}  // namespace hrt
