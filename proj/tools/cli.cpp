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

#include "cli.hpp"

#include <charconv>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hrt/curation/chat_client.hpp"
#include "hrt/curation/curate.hpp"
#include "hrt/curation/synthetic_pool.hpp"
#include "hrt/errors.hpp"
#include "hrt/harness/config.hpp"
#include "hrt/harness/eval.hpp"
#include "hrt/harness/workloads.hpp"
#include "hrt/intervention/generators.hpp"
#include "hrt/model/checkpoint.hpp"
#include "hrt/objective/train.hpp"

namespace hrt {

namespace {

using json = nlohmann::ordered_json;

// Options every subcommand accepts.
struct Common {
  std::uint64_t seed = 0;
  std::string config_path;

  RunConfig config() const { return config_path.empty() ? RunConfig{} : RunConfig::load(config_path); }
  std::string inputs(std::initializer_list<std::string> paths) const {
    std::string extra;
    if (!config_path.empty()) extra += "config:" + file_digest(config_path) + "\n";
    for (const auto& p : paths) {
      if (!p.empty()) extra += "input:" + file_digest(p) + "\n";
    }
    return extra;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_option("--config", c.config_path, "Flat key = value config file");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << content;
  if (!f.flush()) throw IoError("write failed for " + path);
}

// Writes to `path`, or to `out` when the path is empty.
void emit(std::ostream& out, const std::string& path, const std::string& content) {
  if (path.empty()) {
    out << content;
  } else {
    write_file(path, content);
  }
}

std::vector<std::size_t> parse_budgets(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t v = 0;
    const auto* end = item.data() + item.size();
    const auto [ptr, ec] = std::from_chars(item.data(), end, v);
    if (item.empty() || ec != std::errc() || ptr != end) throw InputError("bad budget '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InputError("--budgets is empty");
  return out;
}

// ---- generator selection shared by guide / eval / sweep ----

struct GeneratorChoice {
  std::string kind = "synthetic";
  std::string checkpoint;
  std::string endpoint;
  std::string model_name = "default";
  std::string rules_path;
  std::string policy_path;
  std::string mode;
  std::optional<std::size_t> step_cap;
};

void add_generator_options(CLI::App* cmd, GeneratorChoice& g) {
  cmd->add_option("--generator", g.kind, "synthetic | checkpoint | remote")
      ->check(CLI::IsMember({"synthetic", "checkpoint", "remote"}))
      ->capture_default_str();
  cmd->add_option("--checkpoint", g.checkpoint, "Model checkpoint for --generator checkpoint");
  cmd->add_option("--endpoint", g.endpoint, "Chat-completion URL for --generator remote");
  cmd->add_option("--model", g.model_name, "Model name sent to the endpoint")->capture_default_str();
  cmd->add_option("--rules", g.rules_path, "Detector rules file");
  cmd->add_option("--policy", g.policy_path, "Guidance phrase table file");
  cmd->add_option("--mode", g.mode, "gii | budget-forcing (overrides config)");
  cmd->add_option("--step-cap", g.step_cap, "Maximum generator calls per session (overrides config)");
}

struct Steering {
  EvalOptions options;
  GeneratorFactory factory;
};

Steering make_steering(const GeneratorChoice& g, const RunConfig& config) {
  Steering s;
  s.options.controller.step_cap = g.step_cap.value_or(config.step_cap);
  s.options.controller.mode = g.mode.empty() ? config.mode : parse_mode(g.mode);
  s.options.controller.forcing_phrase = config.forcing_phrase;
  if (g.rules_path.empty()) {
    s.options.rules.window_tokens = config.window_tokens;
  } else {
    s.options.rules = DetectorRules::load(g.rules_path);
  }
  if (!g.policy_path.empty()) s.options.policy = PhraseTable::load(g.policy_path);

  const PhraseTable policy = s.options.policy;
  const std::string forcing = config.forcing_phrase;
  if (g.kind == "synthetic") {
    s.factory = [policy, forcing](const BenchmarkTask&) {
      return std::make_unique<SyntheticReasoner>(policy, forcing);
    };
  } else if (g.kind == "checkpoint") {
    if (g.checkpoint.empty()) throw ContractError("--generator checkpoint needs --checkpoint");
    auto ckpt = std::make_shared<Checkpoint>(load_checkpoint(g.checkpoint));
    if (ckpt->vocabulary.empty()) throw InputError("checkpoint has no vocabulary table");
    auto tokenizer = std::make_shared<Tokenizer>(ckpt->vocabulary);
    const std::size_t chunk = config.chunk_tokens;
    s.factory = [ckpt, tokenizer, chunk](const BenchmarkTask&) {
      return std::make_unique<ModelGenerator>(ckpt->model, *tokenizer, chunk);
    };
  } else {
    if (g.endpoint.empty()) throw ContractError("--generator remote needs --endpoint");
    ChatClientOptions opts;
    opts.endpoint = g.endpoint;
    opts.model = g.model_name;
    ChatClient probe(opts);  // validates the endpoint up front
    s.factory = [opts](const BenchmarkTask&) { return std::make_unique<RemoteGenerator>(ChatClient(opts)); };
  }
  return s;
}

std::string generator_inputs(const GeneratorChoice& g) {
  std::string extra = "generator:" + g.kind + "\nmode:" + g.mode + "\n";
  if (g.step_cap) extra += "step_cap:" + std::to_string(*g.step_cap) + "\n";
  if (!g.checkpoint.empty()) extra += "checkpoint:" + file_digest(g.checkpoint) + "\n";
  if (!g.rules_path.empty()) extra += "rules:" + file_digest(g.rules_path) + "\n";
  if (!g.policy_path.empty()) extra += "policy:" + file_digest(g.policy_path) + "\n";
  if (!g.endpoint.empty()) extra += "endpoint:" + g.endpoint + "\nmodel:" + g.model_name + "\n";
  return extra;
}

// ---- subcommands ----

struct GenArgs {
  Common common;
  std::string kind = "pool";
  std::size_t size = 0;
  std::size_t categories = 5;
  int max_difficulty = 4;
  double defect_rate = 0.1;
  std::size_t max_k = 4;
  std::size_t redirect = 0;
  std::size_t solvable = 0;
  std::string out;
};

int run_gen(const GenArgs& a, std::ostream& out) {
  const RunConfig config = a.common.config();
  std::vector<Triplet> records;
  if (a.kind == "pool") {
    SyntheticPoolOptions o;
    o.size = a.size == 0 ? 5000 : a.size;
    o.categories = a.categories;
    o.max_difficulty = a.max_difficulty;
    o.defect_rate = a.defect_rate;
    o.seed = a.common.seed;
    records = make_synthetic_pool(o);
  } else if (a.kind == "thinking") {
    records = make_thinking_suite(a.size == 0 ? 30 : a.size, a.max_k, a.common.seed);
  } else if (a.kind == "redirection") {
    records = make_redirection_suite(a.size == 0 ? 30 : a.size, a.redirect, a.common.seed);
  } else if (a.kind == "fixed") {
    records = make_fixed_suite(a.size == 0 ? 20 : a.size, a.solvable, a.common.seed);
  } else {
    records = make_successor_triplets(a.size == 0 ? 16 : a.size, config.model.vocab_size);
  }
  std::ostringstream body;
  write_triplets(body, records);
  emit(out, a.out, body.str());
  return kExitOk;
}

struct CurateArgs {
  Common common;
  std::string pool;
  std::optional<std::size_t> target;
  std::string out;
  std::string report;
  std::string category_rules;
  std::string small_endpoint;
  std::string large_endpoint;
};

int run_curate(const CurateArgs& a, std::ostream& out) {
  const RunConfig config = a.common.config();
  const auto pool = load_triplets(a.pool);
  const KeywordClassifier classifier =
      a.category_rules.empty() ? KeywordClassifier{} : KeywordClassifier::load(a.category_rules);

  std::unique_ptr<SolverOracle> small, large;
  const auto oracle = [](const std::string& name, const std::string& endpoint, int capability)
      -> std::unique_ptr<SolverOracle> {
    if (endpoint.empty()) return std::make_unique<ThresholdOracle>(name, capability);
    ChatClientOptions o;
    o.endpoint = endpoint;
    return std::make_unique<RemoteOracle>(name, ChatClient(o));
  };
  small = oracle("small", a.small_endpoint, config.small_capability);
  large = oracle("large", a.large_endpoint, config.large_capability);

  CurationOptions opts;
  opts.target = a.target.value_or(config.target);
  opts.seed = a.common.seed;
  opts.length_policy = config.length_policy;
  const auto result = curate(pool, *small, *large, opts, classifier);

  std::ostringstream body;
  write_triplets(body, result.dataset);
  emit(out, a.out, body.str());
  if (!a.report.empty()) {
    json j = json::parse(result.report.to_json());
    std::string extra = a.common.inputs({a.pool, a.category_rules}) + "target:" +
                        std::to_string(opts.target) + "\nsmall:" + a.small_endpoint + "\nlarge:" +
                        a.large_endpoint + "\n";
    j["fingerprint"] = fingerprint(config, a.common.seed, extra);
    write_file(a.report, j.dump(2) + "\n");
  }
  return kExitOk;
}

struct TrainArgs {
  Common common;
  std::string data;
  std::string out;
  std::string report;
  std::optional<std::size_t> steps;
};

int run_train(const TrainArgs& a, std::ostream& out) {
  RunConfig config = a.common.config();
  if (a.steps) config.training.steps = *a.steps;
  const auto records = load_triplets(a.data);
  if (records.empty()) throw InputError("no training records in " + a.data);

  std::vector<std::string> corpus{"</think>"};
  for (const auto& r : records) {
    corpus.push_back(r.problem);
    corpus.push_back(r.reasoning);
    corpus.push_back(r.solution);
  }
  const Tokenizer tokenizer = Tokenizer::from_corpus(corpus);
  config.model.vocab_size = static_cast<int>(tokenizer.size());

  std::vector<ReasoningTrace> traces;
  std::size_t fallbacks = 0;
  for (const auto& r : records) {
    auto seg = segment_trace({r.problem, r.reasoning, r.solution}, config.segmentation, tokenizer);
    if (seg.used_fallback) ++fallbacks;
    traces.push_back(std::move(seg.trace));
  }

  Model model = insert_adapters(build_model(config.model, a.common.seed), adapter_plan_for(config.model),
                                config.bottleneck, a.common.seed + 1);
  TrainOptions opts = config.training;
  opts.seed = a.common.seed;
  const auto report = train(model, traces, opts);
  save_checkpoint(a.out, model, tokenizer.vocabulary());

  const std::string fp = fingerprint(config, a.common.seed, a.common.inputs({a.data}));
  if (!a.report.empty()) {
    std::ostringstream lines;
    write_training_report(lines, report);
    write_file(a.report, lines.str());
  }
  json summary;
  summary["fingerprint"] = fp;
  summary["records"] = records.size();
  summary["vocab_size"] = tokenizer.size();
  summary["segmentation_fallbacks"] = fallbacks;
  summary["steps"] = report.steps.size();
  summary["final_composite"] = report.final_composite();
  summary["dataset_composite"] = evaluate_composite(model, traces, opts.weights);
  summary["trainable_fraction"] = count_trainable_fraction(model);
  summary["checkpoint"] = a.out;
  out << summary.dump() << '\n';
  return kExitOk;
}

struct GuideArgs {
  Common common;
  GeneratorChoice gen;
  std::string problem;
  std::optional<std::size_t> budget;
  std::string audit;
};

int run_guide(const GuideArgs& a, std::ostream& out) {
  const RunConfig config = a.common.config();
  Steering s = make_steering(a.gen, config);
  s.options.controller.max_interventions = a.budget;
  auto generator = s.factory(BenchmarkTask{"guide", a.problem, "", ""});
  const auto session = run_guided_inference(a.problem, *generator, s.options.controller, s.options.rules,
                                            s.options.policy);
  if (!a.audit.empty()) {
    std::ostringstream lines;
    write_session_audit(lines, session);
    write_file(a.audit, lines.str());
  }
  json j;
  j["fingerprint"] = fingerprint(config, a.common.seed,
                                 a.common.inputs({}) + generator_inputs(a.gen) + "problem:" + a.problem + "\n");
  j["steps"] = session.step;
  j["final_state"] = session.final_state ? json(to_string(*session.final_state)) : json();
  j["completed"] = session.completed;
  j["budget_exhausted"] = session.budget_exhausted;
  j["intervention_cap_reached"] = session.intervention_cap_reached;
  json injected = json::array();
  for (const auto& e : session.events) injected.push_back(e.injected_text);
  j["injected"] = std::move(injected);
  j["no_answer"] = session.no_answer;
  j["solution"] = session.solution;
  j["error"] = session.error ? json(session.error_message) : json();
  j["transcript"] = session.transcript;
  out << j.dump() << '\n';
  return session.error ? kExitContract : kExitOk;
}

struct EvalArgs {
  Common common;
  GeneratorChoice gen;
  std::string tasks;
  std::optional<std::size_t> budget;
  std::string report;
  std::string transcripts;
  std::size_t threads = 1;
};

int run_eval(const EvalArgs& a, std::ostream& out) {
  const RunConfig config = a.common.config();
  Steering s = make_steering(a.gen, config);
  s.options.controller.max_interventions = a.budget;
  s.options.threads = a.threads;
  const auto tasks = tasks_from_triplets(load_triplets(a.tasks));
  std::string extra = a.common.inputs({a.tasks}) + generator_inputs(a.gen);
  if (a.budget) extra += "budget:" + std::to_string(*a.budget) + "\n";
  const auto report = eval(s.factory, tasks, s.options, fingerprint(config, a.common.seed, extra));
  std::ostringstream body;
  write_eval_report(body, report);
  emit(out, a.report, body.str());
  if (!a.transcripts.empty()) {
    std::ostringstream lines;
    write_transcripts(lines, report);
    write_file(a.transcripts, lines.str());
  }
  return kExitOk;
}

struct SweepArgs {
  Common common;
  GeneratorChoice gen;
  std::string tasks;
  std::string budgets;
  std::string out;
  std::size_t threads = 1;
};

int run_sweep(const SweepArgs& a, std::ostream& out) {
  const RunConfig config = a.common.config();
  Steering s = make_steering(a.gen, config);
  s.options.threads = a.threads;
  const auto budgets = parse_budgets(a.budgets);
  const auto tasks = tasks_from_triplets(load_triplets(a.tasks));
  const std::string fp = fingerprint(config, a.common.seed,
                                     a.common.inputs({a.tasks}) + generator_inputs(a.gen) + "budgets:" + a.budgets + "\n");
  const auto curve = scaling_sweep(s.factory, tasks, budgets, s.options, fp);
  std::ostringstream csv;
  write_curve_csv(csv, curve);
  emit(out, a.out, csv.str());
  if (!a.out.empty()) {
    json meta;
    meta["fingerprint"] = fp;
    json points = json::array();
    for (const auto& p : curve.points) {
      points.push_back({{"budget", p.budget}, {"correct_count", p.correct_count}, {"task_count", p.task_count}});
    }
    meta["points"] = std::move(points);
    write_file(a.out + ".meta.json", meta.dump(2) + "\n");
  }
  return kExitOk;
}

int run_gradcheck(const Common& c, std::ostream& out) {
  const RunConfig config = c.config();
  const auto report = run_adapter_gradcheck(config, c.seed);
  out << "gradcheck: " << report.summary() << '\n';
  return report.passed() ? kExitOk : kExitContract;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical reasoning adapters, curation and guided inference", "hrt"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Emit a synthetic pool or task suite as JSONL");
  add_common(gen_cmd, gen.common);
  gen_cmd->add_option("--kind", gen.kind, "pool | thinking | redirection | fixed | traces")
      ->check(CLI::IsMember({"pool", "thinking", "redirection", "fixed", "traces"}))
      ->capture_default_str();
  gen_cmd->add_option("--size", gen.size, "Record count (kind-specific default)");
  gen_cmd->add_option("--categories", gen.categories, "pool: planted categories")->capture_default_str();
  gen_cmd->add_option("--max-difficulty", gen.max_difficulty, "pool: difficulty range 1..N")->capture_default_str();
  gen_cmd->add_option("--defect-rate", gen.defect_rate, "pool: fraction with a planted defect")->capture_default_str();
  gen_cmd->add_option("--max-k", gen.max_k, "thinking: largest number of needed injections")->capture_default_str();
  gen_cmd->add_option("--redirect", gen.redirect, "redirection: tasks that need a redirection")->capture_default_str();
  gen_cmd->add_option("--solvable", gen.solvable, "fixed: tasks answered correctly")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output file (default stdout)");

  CurateArgs cur;
  auto* cur_cmd = app.add_subcommand("curate", "Quality, difficulty and diversity curation of a pool");
  add_common(cur_cmd, cur.common);
  cur_cmd->add_option("--pool", cur.pool, "Pool JSONL")->required();
  cur_cmd->add_option("--target", cur.target, "Dataset size (overrides config)");
  cur_cmd->add_option("--out", cur.out, "Output JSONL (default stdout)");
  cur_cmd->add_option("--report", cur.report, "Curation report JSON");
  cur_cmd->add_option("--category-rules", cur.category_rules, "Category keyword table");
  cur_cmd->add_option("--small-endpoint", cur.small_endpoint, "Chat endpoint for the small oracle");
  cur_cmd->add_option("--large-endpoint", cur.large_endpoint, "Chat endpoint for the large oracle");

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "Train adapters on segmented traces");
  add_common(tr_cmd, tr.common);
  tr_cmd->add_option("--data", tr.data, "Training JSONL")->required();
  tr_cmd->add_option("--out", tr.out, "Checkpoint path")->required();
  tr_cmd->add_option("--report", tr.report, "Per-step JSONL loss log");
  tr_cmd->add_option("--steps", tr.steps, "Optimizer steps (overrides config)");

  GuideArgs gd;
  auto* gd_cmd = app.add_subcommand("guide", "Run one guided-inference session");
  add_common(gd_cmd, gd.common);
  add_generator_options(gd_cmd, gd.gen);
  gd_cmd->add_option("--problem", gd.problem, "Problem text")->required();
  gd_cmd->add_option("--budget,--max-interventions", gd.budget, "Maximum interventions");
  gd_cmd->add_option("--audit", gd.audit, "Session audit JSONL");

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "Guided evaluation over a task file");
  add_common(ev_cmd, ev.common);
  add_generator_options(ev_cmd, ev.gen);
  ev_cmd->add_option("--tasks", ev.tasks, "Task JSONL")->required();
  ev_cmd->add_option("--budget,--max-interventions", ev.budget, "Maximum interventions");
  ev_cmd->add_option("--report", ev.report, "Report JSON (default stdout)");
  ev_cmd->add_option("--transcripts", ev.transcripts, "Per-task transcript JSONL");
  ev_cmd->add_option("--threads", ev.threads, "Parallel sessions")->capture_default_str();

  SweepArgs sw;
  auto* sw_cmd = app.add_subcommand("sweep", "Accuracy over intervention budgets, as CSV");
  add_common(sw_cmd, sw.common);
  add_generator_options(sw_cmd, sw.gen);
  sw_cmd->add_option("--tasks", sw.tasks, "Task JSONL")->required();
  sw_cmd->add_option("--budgets", sw.budgets, "Comma-separated, strictly increasing")->required();
  sw_cmd->add_option("--out", sw.out, "CSV path (default stdout)");
  sw_cmd->add_option("--threads", sw.threads, "Parallel sessions")->capture_default_str();

  Common gc;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Finite-difference check of adapter gradients");
  add_common(gc_cmd, gc);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    err << "error: " << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.front()->help());
    return kExitContract;
  }

  try {
    if (gen_cmd->parsed()) return run_gen(gen, out);
    if (cur_cmd->parsed()) return run_curate(cur, out);
    if (tr_cmd->parsed()) return run_train(tr, out);
    if (gd_cmd->parsed()) return run_guide(gd, out);
    if (ev_cmd->parsed()) return run_eval(ev, out);
    if (sw_cmd->parsed()) return run_sweep(sw, out);
    if (gc_cmd->parsed()) return run_gradcheck(gc, out);
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
    return kExitContract;
  } catch (const DivergenceError& e) {
    err << "error: training diverged at step " << e.step() << ": " << e.what() << '\n';
    return kExitContract;
  }
  return kExitContract;
}

}  // namespace hrt
