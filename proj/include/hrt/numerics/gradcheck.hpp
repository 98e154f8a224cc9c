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

#ifndef HRT_NUMERICS_GRADCHECK_HPP
#define HRT_NUMERICS_GRADCHECK_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "hrt/numerics/tensor.hpp"

namespace hrt {

struct GradCheckOptions {
  double step = 1e-5;
  double relative_tolerance = 1e-4;
  // Floor of the relative-error denominator max(|analytic|, |fd|, floor).
  double denominator_floor = 1e-8;
};

struct GradCheckFailure {
  std::size_t tensor = 0;
  Index row = 0;
  Index col = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
};

struct GradCheckReport {
  std::size_t checked = 0;
  double max_relative_error = 0.0;
  std::vector<GradCheckFailure> failures;

  bool passed() const { return failures.empty(); }
  std::string summary() const;
};

/// Compares backward() of `loss_fn` against central differences for every
/// entry of every tensor in `params`. `loss_fn` must rebuild the graph from
/// the current parameter values on each call. Gradients are zeroed before and
/// after.
GradCheckReport check_gradients(const std::function<Tensor()>& loss_fn,
                                const std::vector<Tensor>& params,
                                const GradCheckOptions& options = {});

}  // namespace hrt

#endif  // HRT_NUMERICS_GRADCHECK_HPP
