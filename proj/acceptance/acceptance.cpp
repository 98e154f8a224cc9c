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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only
// when every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hrt/curation/curate.hpp"
#include "hrt/curation/synthetic_pool.hpp"
#include "hrt/harness/config.hpp"
#include "hrt/harness/eval.hpp"
#include "hrt/harness/workloads.hpp"
#include "hrt/intervention/controller.hpp"
#include "hrt/intervention/generators.hpp"
#include "hrt/model/config.hpp"
#include "hrt/model/transformer.hpp"
#include "hrt/objective/loss.hpp"
#include "hrt/objective/train.hpp"
#include "hrt/random.hpp"
#include "oracles.hpp"

using namespace hrt;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<TokenId> random_ids(Rng& rng, std::size_t n, int vocab) {
  std::vector<TokenId> out(n);
  for (auto& t : out) t = static_cast<TokenId>(rng.index(static_cast<std::uint64_t>(vocab)));
  return out;
}

// ---- 1: gradients of the composite loss on a 2-layer toy ----
Verdict gradient_correctness() {
  const auto t0 = Clock::now();
  RunConfig config;
  config.model = {2, 16, 2, 32, 11, 32};
  config.bottleneck = 4;
  const auto plan = adapter_plan_for(config.model);
  const auto counts = count_parameters(config.model, plan, config.bottleneck);
  GradCheckOptions opts;
  opts.step = 1e-5;
  opts.relative_tolerance = 1e-4;
  std::size_t checked = 0, failures = 0;
  double worst = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto r = run_adapter_gradcheck(config, seed, opts);
    checked += r.checked;
    failures += r.failures.size();
    worst = std::max(worst, r.max_relative_error);
  }
  const double secs = seconds_since(t0);
  const bool all_adapters = checked == 3 * static_cast<std::size_t>(counts.adapter);
  return {failures == 0 && all_adapters && counts.total() <= 100000 && secs < 60,
          fmt("%zu/%zu adapter entries within 1e-4 over 3 seeds (max rel %.2e), %lld params, %.2f s",
              checked - failures, checked, worst, static_cast<long long>(counts.total()), secs)};
}

// ---- 2: zero up-projection makes every adapted model the base model ----
Verdict identity_at_init() {
  const ModelConfig c{3, 8, 2, 16, 11, 24};
  const Model base = build_model(c, 21);
  std::vector<AdapterPlan> plans{default_adapter_plan(c)};
  for (std::size_t layer = 0; layer < 3; ++layer) {
    const std::vector<std::pair<AttachmentPoint, AdapterLevel>> legal{
        {AttachmentPoint::kAfterAttention, AdapterLevel::kStrategic},
        {AttachmentPoint::kAfterAttention, AdapterLevel::kOperational},
        {AttachmentPoint::kAfterFfn, AdapterLevel::kTactical},
        {AttachmentPoint::kAfterFfn, AdapterLevel::kOperational}};
    for (const auto& [point, level] : legal) {
      AdapterPlan p;
      p.layers.resize(3);
      auto& slot = point == AttachmentPoint::kAfterAttention ? p.layers[layer].after_attention
                                                             : p.layers[layer].after_ffn;
      slot = level;
      plans.push_back(p);
    }
  }
  AdapterPlan every;
  every.layers.assign(3, {AdapterLevel::kOperational, AdapterLevel::kOperational});
  plans.push_back(every);

  Rng rng(22);
  std::size_t mismatches = 0;
  for (std::size_t k = 0; k < plans.size(); ++k) {
    const Model adapted = insert_adapters(base, plans[k], 4, 100 + k);
    for (int trial = 0; trial < 100; ++trial) {
      const auto ids = random_ids(rng, 1 + rng.index(24), 11);
      if (!(base.forward(ids).value().array() == adapted.forward(ids).value().array()).all()) ++mismatches;
    }
  }
  return {mismatches == 0,
          fmt("%zu placements x 100 inputs, %zu logit mismatches (bit-exact compare)", plans.size(), mismatches)};
}

// ---- 3: trainable fraction at 14B-like scale ----
Verdict parameter_fraction() {
  const auto t0 = Clock::now();
  const ModelConfig big{48, 5120, 40, 13824, 152064, 4096};
  const auto counts = count_parameters(big, default_adapter_plan(big), 64);
  const double f = counts.trainable_fraction();
  const double secs = seconds_since(t0);
  return {f >= 0.002 && f <= 0.004 && secs < 1,
          fmt("fraction %.5f (%lld adapter / %lld total), %.3f s", f, static_cast<long long>(counts.adapter),
              static_cast<long long>(counts.total()), secs)};
}

// ---- 4: adapters alone fit 16 segmented traces ----
Verdict trainability() {
  const auto t0 = Clock::now();
  const ModelConfig c{12, 256, 4, 256, 11, 64};
  const Model base = build_model(c, 1);
  Model model = insert_adapters(base, default_adapter_plan(c), 64, 2);
  const auto data = make_successor_traces(16, 11);
  TrainOptions opts;  // lr 5e-5, cosine to 0, 500 steps, batch 4, default weights
  const auto report = train(model, data, opts);
  const double loss = evaluate_composite(model, data, opts.weights);

  std::map<std::string, Matrix> before;
  for (const auto& p : base.parameters()) before.emplace(p.name, p.tensor.value());
  std::size_t frozen = 0, changed = 0;
  for (const auto& p : model.parameters()) {
    if (p.trainable) continue;
    ++frozen;
    const auto it = before.find(p.name);
    if (it == before.end() || !(it->second.array() == p.tensor.value().array()).all()) ++changed;
  }
  const double secs = seconds_since(t0);
  return {loss < 0.05 && report.steps.size() == 500 && changed == 0 && frozen == before.size() && secs < 300,
          fmt("composite %.4f nats/token after %zu steps, %zu/%zu frozen tensors unchanged, %.1f s", loss,
              report.steps.size(), frozen - changed, before.size(), secs)};
}

// ---- 5: loss degeneracy against loop-level references ----
Verdict loss_degeneracy() {
  const ModelConfig c{2, 8, 2, 16, 11, 40};
  Model m = insert_adapters(build_model(c, 31), adapter_plan_for(c), 4, 32);
  Rng rng(33);
  for (auto& p : m.parameters()) {
    if (!p.trainable) continue;
    Matrix& v = p.tensor.mutable_value();
    for (Index i = 0; i < v.size(); ++i) v.data()[i] = 0.5 * rng.normal();
  }
  double worst_answer = 0, worst_split = 0;
  for (int trial = 0; trial < 50; ++trial) {
    ReasoningTrace t;
    t.problem = random_ids(rng, rng.index(5), 11);
    t.strategic = random_ids(rng, rng.index(6), 11);
    t.tactical = random_ids(rng, rng.index(6), 11);
    t.operational = random_ids(rng, 1 + rng.index(8), 11);
    t.answer = random_ids(rng, 1 + rng.index(3), 11);
    const auto seq = t.concatenated();
    const Matrix logits = m.forward(std::span<const TokenId>(seq).first(seq.size() - 1)).value();
    double nll = 0;
    for (std::size_t i = 0; i < t.answer.size(); ++i) {
      const std::size_t pos = seq.size() - t.answer.size() + i;
      nll += oracle::ref_nll(logits, static_cast<Index>(pos - 1), seq[pos]);
    }
    nll /= static_cast<double>(t.answer.size());
    worst_answer = std::max(worst_answer, std::abs(composite_loss(m, t, {1, 0, 0, 0}).total.item() - nll));

    const auto loss = composite_loss(m, t);
    const auto ref = oracle::four_pass_terms(m, t);
    const std::array<double, 4> got{loss.answer, loss.strategic, loss.tactical, loss.operational};
    for (std::size_t k = 0; k < 4; ++k) {
      if (loss.counts[k] > 0) worst_split = std::max(worst_split, std::abs(got[k] - ref[k]));
    }
  }
  return {worst_answer <= 1e-12 && worst_split <= 1e-10,
          fmt("answer-only vs plain NLL max |diff| %.2e; one pass vs four passes max |diff| %.2e (50 traces)",
              worst_answer, worst_split)};
}

// ---- 6: curation soundness ----
Verdict curation_soundness() {
  const auto t0 = Clock::now();
  SyntheticPoolOptions po;
  po.seed = 6;
  const auto pool = make_synthetic_pool(po);
  const ThresholdOracle small("small", 1), large("large", 2);
  const std::size_t seeds = 100;
  std::map<std::string, std::size_t> totals;
  std::size_t wrong_size = 0, solvable = 0;
  for (std::size_t seed = 0; seed < seeds; ++seed) {
    const auto result = curate(pool, small, large, {1000, seed});
    if (result.dataset.size() != 1000) ++wrong_size;
    for (const auto& t : result.dataset) {
      if (oracle_correct(small, t) || oracle_correct(large, t)) ++solvable;
      ++totals[planted_category(t)];
    }
  }
  const auto a = curate(pool, small, large, {1000, 42});
  const auto b = curate(pool, small, large, {1000, 42});
  std::ostringstream sa, sb;
  write_triplets(sa, a.dataset);
  write_triplets(sb, b.dataset);
  const bool identical = sa.str() == sb.str();

  // Each draw picks one of K categories uniformly, so a category's total
  // over all seeds is Binomial(seeds * 1000, 1/K).
  const double k = static_cast<double>(po.categories);
  const double n = static_cast<double>(seeds) * 1000.0;
  const double mean = n / k, sigma = std::sqrt(n * (1 / k) * (1 - 1 / k));
  double worst_z = 0;
  for (const auto& [code, count] : totals) worst_z = std::max(worst_z, std::abs(static_cast<double>(count) - mean) / sigma);
  const double secs = seconds_since(t0);
  return {wrong_size == 0 && solvable == 0 && totals.size() == po.categories && worst_z <= 3 && identical && secs < 30,
          fmt("%zu seeds: %zu wrong-size outputs, %zu solvable items, %zu categories, worst |z| %.2f, repeat %s, %.1f s",
              seeds, wrong_size, solvable, totals.size(), worst_z, identical ? "byte-identical" : "DIFFERS", secs)};
}

// ---- 7: controller replay and budget bound ----
class Endless : public Generator {
 public:
  explicit Endless(bool terminate) : terminate_(terminate) {}
  std::string name() const override { return "endless"; }
  std::string next_chunk(const std::string&, const std::string&) override {
    ++calls;
    return terminate_ ? "still going\n</think>" : "and so on and so on ";
  }
  std::size_t calls = 0;

 private:
  bool terminate_;
};

Verdict controller_fidelity() {
  ScriptedGenerator script({"Step 1: set up the sum, more to do.\n</think>",
                            "\nSo 3 + 4 = 7. I'm not sure this is right.\nFinal Answer: 7",
                            "\nRedo: 3 + 4 = 7.\ncheck: substituting back, 7 - 4 = 3 holds.\nFinal Answer: 7"});
  const auto s = run_guided_inference("What is 3 + 4?", script, {.step_cap = 3});
  std::vector<std::string> injected;
  for (const auto& e : s.events) injected.push_back(e.injected_text);
  const bool replay = injected == std::vector<std::string>{"Wait, let me think further.", "Let me try a different approach."} &&
                      s.completed && s.final_state == ReasoningState::kComplete && s.step == 3 && script.calls() == 3;

  std::size_t violations = 0, runs = 0;
  for (std::size_t cap = 1; cap <= 40; ++cap) {
    for (bool terminate : {false, true}) {
      for (ControlMode mode : {ControlMode::kGuided, ControlMode::kBudgetForcing}) {
        Endless gen(terminate);
        ControllerOptions o;
        o.step_cap = cap;
        o.mode = mode;
        const auto session = run_guided_inference("p", gen, o);
        ++runs;
        if (gen.calls > cap || session.step > cap || !session.budget_exhausted) ++violations;
      }
    }
  }
  return {replay && violations == 0,
          fmt("replay %s (%zu injections, COMPLETE at step %zu); %zu/%zu adversarial runs within T calls",
              replay ? "exact" : "MISMATCH", injected.size(), s.step, runs - violations, runs)};
}

// ---- 8: accuracy grows with the intervention budget ----
Verdict scaling_trend() {
  const auto tasks = tasks_from_triplets(make_thinking_suite(30, 4, 8));
  const GeneratorFactory factory = [](const BenchmarkTask&) { return std::make_unique<SyntheticReasoner>(); };
  const auto a = scaling_sweep(factory, tasks, {0, 2, 4});
  const auto b = scaling_sweep(factory, tasks, {0, 2, 4});
  std::ostringstream ca, cb;
  write_curve_csv(ca, a);
  write_curve_csv(cb, b);
  const auto& p = a.points;
  const bool monotone = p[0].accuracy <= p[1].accuracy && p[1].accuracy <= p[2].accuracy;
  const bool rises = p[0].accuracy < p[2].accuracy;
  const bool repeat = ca.str() == cb.str();
  return {monotone && rises && repeat,
          fmt("accuracy %.3f -> %.3f -> %.3f at budgets 0/2/4, repeat %s", p[0].accuracy, p[1].accuracy, p[2].accuracy,
              repeat ? "identical" : "DIFFERS")};
}

// ---- 9: guided intervention against budget forcing ----
Verdict gii_vs_forcing() {
  const auto tasks = tasks_from_triplets(make_redirection_suite(30, 10, 9));
  const GeneratorFactory factory = [](const BenchmarkTask&) { return std::make_unique<SyntheticReasoner>(); };
  EvalOptions gii;
  gii.controller.max_interventions = 4;
  EvalOptions forcing = gii;
  forcing.controller.mode = ControlMode::kBudgetForcing;
  const auto g = eval(factory, tasks, gii);
  const auto f = eval(factory, tasks, forcing);
  return {g.accuracy() >= f.accuracy(),
          fmt("gii %zu/%zu (%.3f) vs budget-forcing %zu/%zu (%.3f), 4 interventions each", g.correct_count, g.task_count,
              g.accuracy(), f.correct_count, f.task_count, f.accuracy())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"gradient correctness", gradient_correctness},
      {"identity at init", identity_at_init},
      {"parameter fraction", parameter_fraction},
      {"trainability", trainability},
      {"loss degeneracy", loss_degeneracy},
      {"curation soundness", curation_soundness},
      {"controller fidelity", controller_fidelity},
      {"scaling trend", scaling_trend},
      {"gii vs budget forcing", gii_vs_forcing},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%s  %zu  %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
