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

#include "hrt/objective/train.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>
#include <numeric>
#include <ostream>

#include "hrt/errors.hpp"
#include "hrt/random.hpp"

namespace hrt {

AdamW::AdamW(std::vector<Tensor> params, AdamWOptions options)
    : params_(std::move(params)), options_(options) {
  for (const auto& p : params_) {
    if (!p.requires_grad()) throw ContractError("AdamW: parameter does not require grad");
    m_.push_back(Matrix::Zero(p.rows(), p.cols()));
    v_.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
}

void AdamW::step(double learning_rate) {
  ++t_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = params_[i];
    const Matrix g = p.grad();
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g.cwiseProduct(g);
    Matrix update = (m_[i] / c1).array() / ((v_[i] / c2).array().sqrt() + options_.epsilon);
    if (options_.weight_decay != 0.0) update += options_.weight_decay * p.value();
    p.mutable_value() -= learning_rate * update;
    p.mark_stale();
  }
}

void AdamW::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

double cosine_learning_rate(double peak, double min_lr, std::size_t step, std::size_t total) {
  if (total == 0) return peak;
  const double progress = static_cast<double>(step) / static_cast<double>(total);
  return min_lr + (peak - min_lr) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

TrainingReport train(Model& model, const std::vector<ReasoningTrace>& dataset,
                     const TrainOptions& options,
                     const std::function<void(const StepRecord&)>& on_step) {
  if (dataset.empty()) throw ContractError("train: empty dataset");
  if (options.batch_size == 0) throw ContractError("train: batch_size must be positive");
  if (!(options.learning_rate >= 0)) throw ContractError("train: negative learning rate");
  options.weights.validate();

  auto params = model.trainable_parameters();
  if (params.empty()) throw ContractError("train: model has no trainable parameters");
  AdamW optimizer(params, options.adamw);
  optimizer.zero_grad();

  Rng rng(options.seed);
  std::vector<std::size_t> order(dataset.size());
  std::size_t cursor = order.size();  // forces a shuffle on the first batch
  const std::size_t batch = std::min(options.batch_size, dataset.size());

  TrainingReport report;
  for (std::size_t step = 0; step < options.steps; ++step) {
    StepRecord rec;
    rec.step = step;
    rec.learning_rate = cosine_learning_rate(options.learning_rate, options.min_learning_rate,
                                             step, options.steps);
    const double inv = 1.0 / static_cast<double>(batch);
    for (std::size_t b = 0; b < batch; ++b) {
      if (cursor == order.size()) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
        cursor = 0;
      }
      const auto& trace = dataset[order[cursor++]];
      auto loss = composite_loss(model, trace, options.weights);
      const double value = loss.total.item();
      if (!std::isfinite(value)) {
        throw DivergenceError(step, "train: non-finite loss at step " + std::to_string(step));
      }
      backward(scale(loss.total, inv));
      rec.answer += inv * loss.answer;
      rec.strategic += inv * loss.strategic;
      rec.tactical += inv * loss.tactical;
      rec.operational += inv * loss.operational;
      rec.composite += inv * value;
    }
    optimizer.step(rec.learning_rate);
    optimizer.zero_grad();
    report.steps.push_back(rec);
    if (on_step) on_step(rec);
  }
  return report;
}

double evaluate_composite(const Model& model, const std::vector<ReasoningTrace>& dataset,
                          const LossWeights& weights) {
  if (dataset.empty()) throw ContractError("evaluate_composite: empty dataset");
  double total = 0;
  for (const auto& trace : dataset) total += composite_loss(model, trace, weights).total.item();
  return total / static_cast<double>(dataset.size());
}

void write_training_report(std::ostream& out, const TrainingReport& report) {
  for (const auto& r : report.steps) {
    nlohmann::ordered_json j;
    j["step"] = r.step;
    j["lr"] = r.learning_rate;
    j["answer"] = r.answer;
    j["strategic"] = r.strategic;
    j["tactical"] = r.tactical;
    j["operational"] = r.operational;
    j["composite"] = r.composite;
    out << j.dump() << '\n';
  }
}

}  // namespace hrt
