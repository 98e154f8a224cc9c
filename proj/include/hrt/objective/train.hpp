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

#ifndef HRT_OBJECTIVE_TRAIN_HPP
#define HRT_OBJECTIVE_TRAIN_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "hrt/model/transformer.hpp"
#include "hrt/objective/loss.hpp"
#include "hrt/objective/trace.hpp"

namespace hrt {

struct AdamWOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
};

/// Adam moments with weight decay applied directly to the parameter
/// (decoupled), not folded into the gradient.
class AdamW {
 public:
  AdamW(std::vector<Tensor> params, AdamWOptions options = {});

  /// One update from the gradients currently held by the parameters.
  void step(double learning_rate);
  void zero_grad();
  std::size_t steps_taken() const { return t_; }

 private:
  std::vector<Tensor> params_;
  std::vector<Matrix> m_, v_;
  AdamWOptions options_;
  std::size_t t_ = 0;
};

/// lr at `step` of `total`: min_lr + (peak - min_lr) * (1 + cos(pi * step / total)) / 2.
double cosine_learning_rate(double peak, double min_lr, std::size_t step, std::size_t total);

struct TrainOptions {
  double learning_rate = 5e-5;
  double min_learning_rate = 0.0;
  std::size_t steps = 500;
  std::size_t batch_size = 4;
  AdamWOptions adamw;
  LossWeights weights;
  std::uint64_t seed = 0;
};

struct StepRecord {
  std::size_t step = 0;
  double learning_rate = 0;
  // Batch means of the per-trace terms and of the weighted total.
  double answer = 0, strategic = 0, tactical = 0, operational = 0;
  double composite = 0;
};

struct TrainingReport {
  std::vector<StepRecord> steps;
  double final_composite() const { return steps.empty() ? 0.0 : steps.back().composite; }
};

/// Shuffled mini-batch loop over `dataset` (reshuffled each epoch from
/// `seed`). Only the model's trainable parameters are updated. The loss in a
/// record is measured before that step's update. Throws DivergenceError with
/// the step index when a batch loss is not finite.
TrainingReport train(Model& model, const std::vector<ReasoningTrace>& dataset,
                     const TrainOptions& options,
                     const std::function<void(const StepRecord&)>& on_step = {});

/// Mean weighted loss over the dataset, no gradients.
double evaluate_composite(const Model& model, const std::vector<ReasoningTrace>& dataset,
                          const LossWeights& weights = {});

/// One JSON object per line: step, lr, answer, strategic, tactical,
/// operational, composite.
void write_training_report(std::ostream& out, const TrainingReport& report);

}  // namespace hrt

#endif  // HRT_OBJECTIVE_TRAIN_HPP
