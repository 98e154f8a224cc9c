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

#include <atomic>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "hrt/answer.hpp"
#include "hrt/curation/chat_client.hpp"
#include "hrt/curation/curate.hpp"
#include "hrt/curation/filters.hpp"
#include "hrt/curation/synthetic_pool.hpp"
#include "hrt/curation/triplet.hpp"
#include "hrt/errors.hpp"
#include "hrt/objective/tokenizer.hpp"

// After the Eigen-based headers: <resolv.h> (pulled in by httplib) defines
// a _res macro that collides with Eigen parameter names.
#include <httplib.h>

using namespace hrt;

namespace {

Triplet clean(std::string id = "t1") {
  return {id, "What is 2 + 3?", "Step 1: add.\nStep 2: so \\(2 + 3 = 5\\).\nFinal Answer: 5", "5",
          "unit", std::nullopt};
}

// Oracle with a fixed answer table keyed by problem text.
class TableOracle : public SolverOracle {
 public:
  explicit TableOracle(std::map<std::string, std::string> table) : table_(std::move(table)) {}
  std::string name() const override { return "table"; }
  OracleAnswer solve(const std::string& problem) const override {
    auto it = table_.find(problem);
    if (it == table_.end()) return {};
    return {it->second, true};
  }

 private:
  std::map<std::string, std::string> table_;
};

Triplet with_len(const std::string& id, const std::string& cat, std::size_t words) {
  Triplet t{id, "p " + id, "", "1", "unit", cat};
  for (std::size_t i = 0; i < words; ++i) t.reasoning += "w ";
  return t;
}

}  // namespace

// ---------------------------------------------------------------- answers

TEST_CASE("final-answer declarations: last wins") {
  CHECK(last_declared_answer("work\nFinal Answer: 204") == "204");
  CHECK(last_declared_answer("Final Answer: 10\nmore\nfinal answer: 12.") == "12");
  CHECK(last_declared_answer("so \\boxed{\\frac{1}{2}} then") == "\\frac{1}{2}");
  CHECK(last_declared_answer("Final Answer: 3\nthen \\boxed{4}") == "4");
  CHECK(last_declared_answer("no declaration here").empty());
  CHECK(last_declared_answer("").empty());
}

TEST_CASE("normalize_answer") {
  CHECK(normalize_answer("  042 ") == "42");
  CHECK(normalize_answer("+7") == "7");
  CHECK(normalize_answer("-0") == "0");
  CHECK(normalize_answer("6/8") == "3/4");
  CHECK(normalize_answer("-10/5") == "-2");
  CHECK(normalize_answer("2.500") == "2.5");
  CHECK(normalize_answer("3.0") == "3");
  CHECK(normalize_answer("$\\boxed{17}$.") == "17");
  CHECK(normalize_answer("  Blue   Whale ") == "blue whale");
  CHECK(answers_match("007", "7"));
  CHECK_FALSE(answers_match("", ""));
  CHECK_FALSE(answers_match("8", "7"));
}

// ---------------------------------------------------------------- records

TEST_CASE("triplet JSONL round trip and errors") {
  std::vector<Triplet> v{clean("a"), clean("b")};
  v[1].category = "05 combinatorics";
  v[1].reasoning = "line \"quoted\"\n\tunicode \xCE\xB1";
  std::stringstream io;
  write_triplets(io, v);
  CHECK(io.str().find("\"id\":\"a\",\"problem\"") != std::string::npos);
  CHECK(io.str().find("\"category\":null") != std::string::npos);
  CHECK(read_triplets(io) == v);

  std::stringstream dup(to_jsonl_line(v[0]) + "\n\n" + to_jsonl_line(v[0]) + "\n");
  CHECK_THROWS_WITH_AS(read_triplets(dup), doctest::Contains("line 3"), InputError);
  std::stringstream bad("{\"id\": \"x\"}\n");
  CHECK_THROWS_AS(read_triplets(bad), InputError);
  std::stringstream junk("not json\n");
  CHECK_THROWS_AS(read_triplets(junk), InputError);
  CHECK_THROWS_AS(load_triplets("/nonexistent/dir/pool.jsonl"), IoError);
}

// ---------------------------------------------------------------- quality

TEST_CASE("quality rules") {
  CHECK_FALSE(check_quality(clean()).has_value());

  auto t = clean();
  t.reasoning = "Let \\( x = 2.\nFinal Answer: 5";
  CHECK(check_quality(t) == QualityIssue::kUnbalancedMath);
  t.reasoning = "cost is $5 and more\nFinal Answer: 5";
  CHECK(check_quality(t) == QualityIssue::kUnbalancedMath);
  t.reasoning = "price \\$5 stays\nFinal Answer: 5";
  CHECK_FALSE(check_quality(t).has_value());
  t.reasoning = "{ a } }";
  CHECK(check_quality(t) == QualityIssue::kUnbalancedMath);

  t = clean();
  t.reasoning = "   \n";
  CHECK(check_quality(t) == QualityIssue::kEmptyReasoning);
  t = clean();
  t.solution = "";
  CHECK(check_quality(t) == QualityIssue::kEmptyField);

  t = clean();
  t.reasoning = "Step 1: begin and then ...";
  CHECK(check_quality(t) == QualityIssue::kTruncated);
  t.reasoning = "Step 1: x [TRUNCATED] y";
  CHECK(check_quality(t) == QualityIssue::kTruncated);

  t = clean();
  t.reasoning = "Step 1: a\nStep 3: b\nFinal Answer: 5";
  CHECK(check_quality(t) == QualityIssue::kStepMarkerInconsistent);

  t = clean();
  t.reasoning = "Final Answer: 5\nFinal Answer: 6";
  CHECK(check_quality(t) == QualityIssue::kContradictoryAnswer);
  t.reasoning = "Final Answer: 05\nFinal Answer: 5";  // same after normalization
  CHECK_FALSE(check_quality(t).has_value());

  const auto result = quality_filter({clean("a"), t, with_len("c", "x", 0)});
  CHECK(result.kept.size() == 2);
  REQUIRE(result.rejected.size() == 1);
  CHECK(to_string(result.rejected[0].second) == "EMPTY_REASONING");
}

TEST_CASE("quality rules recover every planted defect") {
  const auto pool = make_synthetic_pool({.size = 2000, .defect_rate = 0.3, .seed = 3});
  std::size_t defects = 0;
  for (const auto& t : pool) {
    const auto issue = check_quality(t);
    const auto planted = planted_defect(t);
    INFO(t.id << " " << t.reasoning);
    if (planted.empty()) {
      CHECK_FALSE(issue.has_value());
    } else {
      ++defects;
      REQUIRE(issue.has_value());
      CHECK(to_string(*issue) == planted);
    }
  }
  CHECK(defects > 400);
}

// ---------------------------------------------------------------- difficulty

TEST_CASE("difficulty filter keeps exactly the doubly failed") {
  Triplet both = clean("both");
  both.problem = "p1";
  Triplet large_right = clean("large");
  large_right.problem = "p2";
  Triplet small_right = clean("small");
  small_right.problem = "p3";
  Triplet unanswered = clean("none");
  unanswered.problem = "p4";
  const TableOracle small({{"p1", "4"}, {"p2", "4"}, {"p3", "5"}});
  const TableOracle large({{"p1", "6"}, {"p2", "005"}, {"p3", "9"}});
  const auto r = difficulty_filter({both, large_right, small_right, unanswered}, small, large);
  REQUIRE(r.kept.size() == 2);
  CHECK(r.kept[0].id == "both");
  CHECK(r.kept[1].id == "none");
  CHECK(r.solved_by_small == 1);
  CHECK(r.solved_by_large == 1);
  CHECK(r.oracle_failures == 2);
  CHECK(r.log.size() == 2);
  CHECK(difficulty_filter({}, small, large).kept.empty());
}

TEST_CASE("ThresholdOracle") {
  const ThresholdOracle o("t", 2);
  CHECK(o.solve("x (difficulty 2) compute 3 + 4.").answer == "7");
  CHECK(o.solve("x (difficulty 3) compute 3 + 4.").answer == "8");
  CHECK(o.solve("x (difficulty 1) compute 3 * -4.").answer == "-12");
  CHECK_FALSE(o.solve("no planted fields").answered);
}

// ---------------------------------------------------------------- classify

TEST_CASE("classify_domains") {
  Triplet pre = clean("pre");
  pre.category = "05 combinatorics";
  pre.problem = "A triangle with one angle.";
  Triplet geo = clean("geo");
  geo.problem = "In a triangle, find the angle opposite the longest side.";
  Triplet none = clean("none");
  none.problem = "Zzz qqq.";
  none.reasoning = "nothing";
  const auto index = classify_domains({pre, geo, none});
  CHECK(index.at("05 combinatorics").front().id == "pre");
  CHECK(index.at("51 geometry").front().id == "geo");
  CHECK(index.at("misc").front().id == "none");
  // "angles" is not the whole word "angle".
  Triplet plural = clean("pl");
  plural.problem = "triangle angles";
  plural.reasoning = "x";
  CHECK(KeywordClassifier().classify(plural) == "51 geometry");
}

TEST_CASE("classify_domains: partition and planted categories") {
  const auto pool = make_synthetic_pool({.size = 1500, .categories = 10, .seed = 4});
  const auto index = classify_domains(pool);
  std::size_t total = 0;
  std::set<std::string> seen;
  for (const auto& [code, members] : index) {
    total += members.size();
    for (const auto& t : members) {
      CHECK(seen.insert(t.id).second);
      CHECK(code == planted_category(t));
    }
  }
  CHECK(total == pool.size());
}

TEST_CASE("shipped rule file matches the built-in table") {
  const auto loaded = KeywordClassifier::load(HRT_SOURCE_DIR "/data/category_rules.txt");
  const auto& builtin = default_category_rules();
  REQUIRE(loaded.rules().size() == builtin.size());
  for (std::size_t i = 0; i < builtin.size(); ++i) {
    CHECK(loaded.rules()[i].code == builtin[i].code);
    CHECK(loaded.rules()[i].keywords == builtin[i].keywords);
  }
  std::stringstream bad("no tab here\n");
  CHECK_THROWS_AS(KeywordClassifier::parse(bad), InputError);
}

// ---------------------------------------------------------------- diversity

TEST_CASE("diversity_sample: two categories of ten, target four") {
  CategoryIndex index;
  for (int i = 0; i < 10; ++i) {
    index["A"].push_back(with_len("a" + std::to_string(i), "A", 10 + i));
    index["B"].push_back(with_len("b" + std::to_string(i), "B", 30 - i));
  }
  double from_a = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto r = diversity_sample(index, 4, seed);
    REQUIRE(r.selected.size() == 4);
    CHECK_FALSE(r.shortfall);
    std::vector<std::string> a_ids;
    std::vector<std::string> b_ids;
    for (const auto& t : r.selected) (t.category == "A" ? a_ids : b_ids).push_back(t.id);
    // Each category contributes its longest items, longest first.
    for (std::size_t k = 0; k < a_ids.size(); ++k) CHECK(a_ids[k] == "a" + std::to_string(9 - k));
    for (std::size_t k = 0; k < b_ids.size(); ++k) CHECK(b_ids[k] == "b" + std::to_string(k));
    from_a += static_cast<double>(a_ids.size());
  }
  CHECK(from_a / 1000.0 == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::abs(from_a / 1000.0 - 2.0) <= 0.1);
}

TEST_CASE("diversity_sample: degenerate cases") {
  CategoryIndex one;
  one["A"] = {with_len("x", "A", 3), with_len("y", "A", 9), with_len("z", "A", 9), with_len("w", "A", 1)};
  CHECK(diversity_sample(one, 0, 1).selected.empty());
  const auto r = diversity_sample(one, 3, 1);
  REQUIRE(r.selected.size() == 3);
  CHECK(r.selected[0].id == "y");  // ties by id
  CHECK(r.selected[1].id == "z");
  CHECK(r.selected[2].id == "x");
  const auto all = diversity_sample(one, 10, 1);
  CHECK(all.selected.size() == 4);
  CHECK(all.shortfall);
  CHECK_THROWS_AS(diversity_sample({}, 1, 1), ContractError);

  const auto w1 = diversity_sample(one, 3, 5, LengthPolicy::kLengthWeighted);
  const auto w2 = diversity_sample(one, 3, 5, LengthPolicy::kLengthWeighted);
  CHECK(w1.selected == w2.selected);
  std::set<std::string> ids;
  for (const auto& t : w1.selected) ids.insert(t.id);
  CHECK(ids.size() == 3);
}

// ---------------------------------------------------------------- curate

TEST_CASE("curate: synthetic pool end to end") {
  const auto pool = make_synthetic_pool({.size = 5000, .seed = 11});
  const ThresholdOracle small("small", 1);
  const ThresholdOracle large("large", 2);
  const auto result = curate(pool, small, large, {.target = 1000, .seed = 7});
  const auto& rep = result.report;
  CHECK(result.dataset.size() == 1000);
  CHECK_FALSE(rep.shortfall);
  CHECK(rep.pool_size >= rep.after_quality);
  CHECK(rep.after_quality >= rep.after_difficulty);
  CHECK(rep.after_difficulty >= rep.selected);
  std::set<std::string> ids;
  for (const auto& t : result.dataset) {
    CHECK_FALSE(oracle_correct(small, t));
    CHECK_FALSE(oracle_correct(large, t));
    CHECK(planted_difficulty(t) > 2);
    CHECK(planted_defect(t).empty());
    CHECK(ids.insert(t.id).second);
  }
  std::size_t rejected = 0;
  for (const auto& [reason, n] : rep.rejections) rejected += n;
  CHECK(rejected == rep.pool_size - rep.after_difficulty);
  CHECK(nlohmann::json::parse(rep.to_json()).at("selected") == 1000);

  // Within each category the selection is exactly its top-k by length.
  const auto index = classify_domains(difficulty_filter(quality_filter(pool).kept, small, large).kept);
  for (const auto& [code, members] : index) {
    std::vector<Triplet> sorted = members;
    std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
      const auto la = count_tokens(a.reasoning);
      const auto lb = count_tokens(b.reasoning);
      return la != lb ? la > lb : a.id < b.id;
    });
    std::vector<std::string> chosen;
    for (const auto& t : result.dataset) {
      if (t.category == code) chosen.push_back(t.id);
    }
    for (std::size_t k = 0; k < chosen.size(); ++k) CHECK(chosen[k] == sorted[k].id);
  }

  std::stringstream a;
  std::stringstream b;
  write_triplets(a, result.dataset);
  write_triplets(b, curate(pool, small, large, {.target = 1000, .seed = 7}).dataset);
  CHECK(a.str() == b.str());
}

TEST_CASE("curate: everything solvable gives an empty dataset and a shortfall") {
  const auto pool = make_synthetic_pool({.size = 200, .max_difficulty = 1, .seed = 2});
  const ThresholdOracle small("small", 1);
  const ThresholdOracle large("large", 2);
  const auto result = curate(pool, small, large, {.target = 50, .seed = 1});
  CHECK(result.dataset.empty());
  CHECK(result.report.shortfall);
  CHECK(result.report.after_difficulty == 0);
}

// ---------------------------------------------------------------- chat client

namespace {

struct LocalServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  LocalServer() = default;
  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LocalServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions"; }
};

std::string reply_body(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}},
                                      {"finish_reason", "stop"}}}}}
      .dump();
}

}  // namespace

TEST_CASE("chat client: retries with exponential backoff") {
  LocalServer srv;
  std::atomic<int> calls{0};
  std::string last_request;
  srv.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    last_request = req.body;
    if (++calls <= 2) {
      res.status = calls == 1 ? 503 : 429;
      return;
    }
    res.set_content(reply_body("thinking\nFinal Answer: 41"), "application/json");
  });
  srv.start();

  std::vector<long long> sleeps;
  ChatClientOptions opt;
  opt.endpoint = srv.url();
  opt.model = "m";
  ChatClient client(opt, [&](std::chrono::milliseconds d) { sleeps.push_back(d.count()); });
  const auto reply = client.complete({{"user", "hi"}});
  CHECK(reply.content == "thinking\nFinal Answer: 41");
  CHECK(reply.finish_reason == "stop");
  CHECK(reply.attempts == 3);
  CHECK(sleeps == std::vector<long long>{500, 1000});
  const auto req = nlohmann::json::parse(last_request);
  CHECK(req.at("model") == "m");
  CHECK(req.at("messages").at(0).at("content") == "hi");
  CHECK(req.at("temperature") == 0.0);

  calls = 0;
  const RemoteOracle oracle("remote", client);
  const auto answer = oracle.solve("question");
  CHECK(answer.answered);
  CHECK(answer.answer == "41");
}

TEST_CASE("chat client: failures") {
  LocalServer srv;
  std::atomic<int> calls{0};
  srv.server.Post("/bad", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 400;
    res.set_content("nope", "text/plain");
  });
  srv.server.Post("/down", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 500;
  });
  srv.server.Post("/garbled", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"choices\": []}", "application/json");
  });
  srv.start();
  const std::string base = "http://127.0.0.1:" + std::to_string(srv.port);
  std::vector<long long> sleeps;
  const auto sleeper = [&](std::chrono::milliseconds d) { sleeps.push_back(d.count()); };

  ChatClientOptions opt;
  opt.endpoint = base + "/bad";
  CHECK_THROWS_AS(ChatClient(opt, sleeper).complete({{"user", "x"}}), IoError);
  CHECK(calls == 1);

  calls = 0;
  opt.endpoint = base + "/down";
  opt.retry.max_attempts = 5;
  opt.retry.max_backoff = std::chrono::milliseconds(1500);
  CHECK_THROWS_WITH_AS(ChatClient(opt, sleeper).complete({{"user", "x"}}),
                       doctest::Contains("5 attempts"), IoError);
  CHECK(calls == 5);
  CHECK(sleeps == std::vector<long long>{500, 1000, 1500, 1500});

  opt.endpoint = base + "/garbled";
  CHECK_THROWS_AS(ChatClient(opt, sleeper).complete({{"user", "x"}}), IoError);
  CHECK_FALSE(RemoteOracle("r", ChatClient(opt, sleeper)).solve("q").answered);

  opt.endpoint = "https://example.com/v1";
  CHECK_THROWS_AS(ChatClient(opt, sleeper), ContractError);
}
