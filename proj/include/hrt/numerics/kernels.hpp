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

// Scalar-generic, graph-free kernels. The autodiff ops call these for their
// forward values; they are also usable directly on any Eigen expression.

#ifndef HRT_NUMERICS_KERNELS_HPP
#define HRT_NUMERICS_KERNELS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <concepts>
#include <numbers>

namespace hrt::kernels {

template <std::floating_point Scalar>
Scalar gelu(Scalar x) {
  using std::erf;
  return Scalar(0.5) * x * (Scalar(1) + erf(x * Scalar(std::numbers::sqrt2 / 2)));
}

// d/dx [x * Phi(x)] = Phi(x) + x * phi(x)
template <std::floating_point Scalar>
Scalar gelu_derivative(Scalar x) {
  using std::erf;
  using std::exp;
  const Scalar cdf = Scalar(0.5) * (Scalar(1) + erf(x * Scalar(std::numbers::sqrt2 / 2)));
  const Scalar pdf = exp(Scalar(-0.5) * x * x) * Scalar(std::numbers::inv_sqrtpi / std::numbers::sqrt2);
  return cdf + x * pdf;
}

template <typename Derived>
auto gelu(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([](Scalar v) { return gelu(v); });
}

template <typename Derived>
auto gelu_derivative(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([](Scalar v) { return gelu_derivative(v); });
}

// Row-wise log-softmax with the max subtracted for stability.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
log_softmax_rows(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(logits.rows(),
                                                                             logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const Scalar peak = logits.row(i).maxCoeff();
    const Scalar lse = peak + std::log((logits.row(i).array() - peak).exp().sum());
    out.row(i) = logits.row(i).array() - lse;
  }
  return out;
}

}  // namespace hrt::kernels

#endif  // HRT_NUMERICS_KERNELS_HPP
