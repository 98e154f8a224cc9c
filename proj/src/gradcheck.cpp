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

#include "hrt/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hrt {

std::string GradCheckReport::summary() const {
  std::ostringstream os;
  os << checked << " entries checked, " << failures.size()
     << " failures, max relative error " << max_relative_error;
  return os.str();
}

GradCheckReport check_gradients(const std::function<Tensor()>& loss_fn,
                                const std::vector<Tensor>& params,
                                const GradCheckOptions& options) {
  std::vector<Tensor> handles = params;
  for (auto& p : handles) p.zero_grad();
  backward(loss_fn());
  std::vector<Matrix> analytic;
  analytic.reserve(handles.size());
  for (const auto& p : handles) analytic.push_back(p.grad());
  for (auto& p : handles) p.zero_grad();

  GradCheckReport report;
  for (std::size_t t = 0; t < handles.size(); ++t) {
    Matrix& value = handles[t].mutable_value();
    for (Index i = 0; i < value.rows(); ++i) {
      for (Index j = 0; j < value.cols(); ++j) {
        const double saved = value(i, j);
        value(i, j) = saved + options.step;
        const double up = loss_fn().item();
        value(i, j) = saved - options.step;
        const double down = loss_fn().item();
        value(i, j) = saved;

        const double numeric = (up - down) / (2.0 * options.step);
        const double a = analytic[t](i, j);
        const double denom =
            std::max({std::abs(a), std::abs(numeric), options.denominator_floor});
        const double rel = std::abs(a - numeric) / denom;
        ++report.checked;
        report.max_relative_error = std::max(report.max_relative_error, rel);
        if (!(rel <= options.relative_tolerance)) {
          report.failures.push_back({t, i, j, a, numeric, rel});
        }
      }
    }
  }
  return report;
}

}  // namespace hrt
