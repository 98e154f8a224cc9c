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

#include <cmath>
#include <filesystem>
#include <map>
#include <vector>

#include "doctest.h"
#include "hrt/errors.hpp"
#include "hrt/model/checkpoint.hpp"
#include "hrt/model/transformer.hpp"
#include "hrt/random.hpp"

using namespace hrt;

namespace {

ModelConfig toy_config() {
  ModelConfig c;
  c.n_layers = 2;
  c.d_model = 8;
  c.n_heads = 2;
  c.d_ff = 16;
  c.vocab_size = 11;
  c.max_seq_len = 16;
  return c;
}

std::vector<TokenId> random_tokens(Rng& rng, std::size_t n, int vocab) {
  std::vector<TokenId> out(n);
  for (auto& t : out) t = static_cast<TokenId>(rng.index(static_cast<std::uint64_t>(vocab)));
  return out;
}

void randomize_adapters(Model& m, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& p : m.parameters()) {
    if (p.name.find(".adapter.") == std::string::npos) continue;
    Matrix& v = p.tensor.mutable_value();
    for (Index i = 0; i < v.size(); ++i) v.data()[i] = 0.5 * rng.normal();
  }
}

// ---- Independent forward oracle: plain loops over std::vector ----

using Grid = std::vector<std::vector<double>>;

Grid to_grid(const Matrix& m) {
  Grid g(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) g[i][j] = m(i, j);
  return g;
}

Grid mm(const Grid& a, const Grid& b) {
  Grid c(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

double ref_gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

Grid ln(const Grid& x, const Grid& g, const Grid& b) {
  Grid out = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double mean = 0.0;
    for (double v : x[i]) mean += v;
    mean /= static_cast<double>(x[i].size());
    double var = 0.0;
    for (double v : x[i]) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x[i].size());
    for (std::size_t j = 0; j < x[i].size(); ++j)
      out[i][j] = (x[i][j] - mean) / std::sqrt(var + 1e-5) * g[0][j] + b[0][j];
  }
  return out;
}

Grid adapter_ref(const Grid& h, const Grid& down, const Grid& up) {
  Grid mid = mm(h, down);
  for (auto& row : mid)
    for (auto& v : row) v = ref_gelu(v);
  Grid delta = mm(mid, up);
  Grid out = h;
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = 0; j < h[i].size(); ++j) out[i][j] += delta[i][j];
  return out;
}

Grid reference_forward(const Model& model, const std::vector<TokenId>& tokens) {
  std::map<std::string, Grid> p;
  for (const auto& np : model.parameters()) p[np.name] = to_grid(np.tensor.value());
  const ModelConfig& c = model.config();
  const std::size_t T = tokens.size();
  const std::size_t d = static_cast<std::size_t>(c.d_model);
  const std::size_t hd = d / static_cast<std::size_t>(c.n_heads);

  Grid x(T, std::vector<double>(d));
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t j = 0; j < d; ++j)
      x[t][j] = p["token_embedding"][tokens[t]][j] + p["position_embedding"][t][j];

  for (int layer = 0; layer < c.n_layers; ++layer) {
    const std::string pre = "blocks." + std::to_string(layer) + ".";
    const Grid xn = ln(x, p[pre + "ln1.gain"], p[pre + "ln1.bias"]);
    const Grid q = mm(xn, p[pre + "attn.query"]);
    const Grid k = mm(xn, p[pre + "attn.key"]);
    const Grid v = mm(xn, p[pre + "attn.value"]);
    Grid merged(T, std::vector<double>(d, 0.0));
    for (int h = 0; h < c.n_heads; ++h) {
      const std::size_t off = static_cast<std::size_t>(h) * hd;
      for (std::size_t i = 0; i < T; ++i) {
        std::vector<double> w(i + 1);
        double peak = -1e300;
        for (std::size_t j = 0; j <= i; ++j) {
          double s = 0.0;
          for (std::size_t e = 0; e < hd; ++e) s += q[i][off + e] * k[j][off + e];
          w[j] = s / std::sqrt(static_cast<double>(hd));
          peak = std::max(peak, w[j]);
        }
        double z = 0.0;
        for (auto& s : w) z += (s = std::exp(s - peak));
        for (std::size_t j = 0; j <= i; ++j)
          for (std::size_t e = 0; e < hd; ++e) merged[i][off + e] += w[j] / z * v[j][off + e];
      }
    }
    const Grid attn = mm(merged, p[pre + "attn.out"]);
    for (std::size_t i = 0; i < T; ++i)
      for (std::size_t j = 0; j < d; ++j) x[i][j] += attn[i][j];
    if (p.count(pre + "adapter.after_attention.down"))
      x = adapter_ref(x, p[pre + "adapter.after_attention.down"], p[pre + "adapter.after_attention.up"]);
    Grid hidden = mm(ln(x, p[pre + "ln2.gain"], p[pre + "ln2.bias"]), p[pre + "ffn.in.weight"]);
    for (auto& row : hidden)
      for (std::size_t j = 0; j < row.size(); ++j) row[j] = ref_gelu(row[j] + p[pre + "ffn.in.bias"][0][j]);
    const Grid ffn = mm(hidden, p[pre + "ffn.out.weight"]);
    for (std::size_t i = 0; i < T; ++i)
      for (std::size_t j = 0; j < d; ++j) x[i][j] += ffn[i][j] + p[pre + "ffn.out.bias"][0][j];
    if (p.count(pre + "adapter.after_ffn.down"))
      x = adapter_ref(x, p[pre + "adapter.after_ffn.down"], p[pre + "adapter.after_ffn.up"]);
  }
  const Grid xf = ln(x, p["final_ln.gain"], p["final_ln.bias"]);
  const Grid& emb = p["token_embedding"];
  Grid logits(T, std::vector<double>(emb.size(), 0.0));
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t v = 0; v < emb.size(); ++v) {
      for (std::size_t j = 0; j < d; ++j) logits[t][v] += xf[t][j] * emb[v][j];
      logits[t][v] /= std::sqrt(static_cast<double>(d));
    }
  return logits;
}

// Hand parameter-count formula for the architecture, written out term by term.
std::int64_t hand_count(const ModelConfig& c) {
  const std::int64_t d = c.d_model, ff = c.d_ff;
  const std::int64_t embeddings = c.vocab_size * d + c.max_seq_len * d;
  const std::int64_t norms = 2 * (2 * d);
  const std::int64_t attention = 4 * d * d;
  const std::int64_t ffn = d * ff + ff + ff * d + d;
  return embeddings + c.n_layers * (norms + attention + ffn) + 2 * d;
}

AdapterPlan two_layer_plan() {
  AdapterPlan plan;
  plan.layers.resize(2);
  plan.layers[0].after_attention = AdapterLevel::kStrategic;
  plan.layers[1].after_ffn = AdapterLevel::kTactical;
  plan.layers[1].after_attention = AdapterLevel::kOperational;
  return plan;
}

}  // namespace

TEST_CASE("build_model: shape contract and determinism") {
  const Model m = build_model(toy_config(), 3);
  const std::vector<TokenId> tokens{1, 5, 10};
  const Tensor logits = m.forward(tokens);
  CHECK(logits.rows() == 3);
  CHECK(logits.cols() == 11);
  CHECK(logits.all_finite());

  const Model again = build_model(toy_config(), 3);
  const auto a = m.parameters();
  const auto b = again.parameters();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].tensor.value() == b[i].tensor.value());
  }
  CHECK(m.forward(tokens).value() == again.forward(tokens).value());
}

TEST_CASE("build_model: parameter count matches the hand formula") {
  for (const ModelConfig& c : {toy_config(), ModelConfig{3, 12, 3, 20, 17, 9}, ModelConfig{1, 4, 1, 4, 2, 1}}) {
    const Model m = build_model(c, 1);
    std::int64_t total = 0;
    for (const auto& p : m.parameters()) total += p.tensor.size();
    CHECK(total == hand_count(c));
    CHECK(count_parameters(c, {}, 0).total() == hand_count(c));
  }
}

TEST_CASE("build_model: invalid config") {
  ModelConfig c = toy_config();
  c.n_heads = 3;
  CHECK_THROWS_AS(build_model(c, 0), ContractError);
  c = toy_config();
  c.vocab_size = 0;
  CHECK_THROWS_AS(build_model(c, 0), ContractError);
}

TEST_CASE("default_adapter_plan: thirds partition") {
  auto levels = [](int layers) {
    ModelConfig c = toy_config();
    c.n_layers = layers;
    return default_adapter_plan(c);
  };
  SUBCASE("L=9") {
    const AdapterPlan p = levels(9);
    for (int i = 0; i < 3; ++i) {
      CHECK(p.layers[i].after_attention == AdapterLevel::kStrategic);
      CHECK_FALSE(p.layers[i].after_ffn.has_value());
    }
    for (int i = 3; i < 6; ++i) {
      CHECK(p.layers[i].after_ffn == AdapterLevel::kTactical);
      CHECK_FALSE(p.layers[i].after_attention.has_value());
    }
    for (int i = 6; i < 9; ++i) {
      CHECK(p.layers[i].after_attention == AdapterLevel::kOperational);
      CHECK(p.layers[i].after_ffn == AdapterLevel::kOperational);
    }
  }
  SUBCASE("L=3") {
    const AdapterPlan p = levels(3);
    CHECK(p.layers[0].after_attention == AdapterLevel::kStrategic);
    CHECK(p.layers[1].after_ffn == AdapterLevel::kTactical);
    CHECK(p.layers[2].after_attention == AdapterLevel::kOperational);
    CHECK(p.adapter_count() == 4);
  }
  SUBCASE("L=48") {
    const AdapterPlan p = levels(48);
    int s = 0, t = 0, o = 0;
    for (const auto& layer : p.layers) {
      for (const auto& slot : {layer.after_attention, layer.after_ffn}) {
        if (!slot) continue;
        s += *slot == AdapterLevel::kStrategic;
        t += *slot == AdapterLevel::kTactical;
        o += *slot == AdapterLevel::kOperational;
      }
    }
    CHECK(s == 16);
    CHECK(t == 16);
    CHECK(o == 32);
    CHECK(p.adapter_count() == 64);
  }
  SUBCASE("fewer than three layers") {
    CHECK_THROWS_AS(levels(2), ContractError);
  }
}

TEST_CASE("default_adapter_plan: every generated plan is legal for L in [3, 96]") {
  for (int layers = 3; layers <= 96; ++layers) {
    ModelConfig c = toy_config();
    c.n_layers = layers;
    const AdapterPlan p = default_adapter_plan(c);
    CHECK_NOTHROW(validate_plan(p, layers));
    CHECK(plan_respects_zones(p, layers));
    // Every layer receives at least one adapter.
    for (const auto& layer : p.layers) {
      CHECK((layer.after_attention.has_value() || layer.after_ffn.has_value()));
    }
  }
}

TEST_CASE("validate_plan rejects misplaced levels") {
  AdapterPlan p;
  p.layers.resize(2);
  p.layers[0].after_ffn = AdapterLevel::kStrategic;
  CHECK_THROWS_AS(validate_plan(p, 2), ContractError);
  p.layers[0] = {};
  p.layers[1].after_attention = AdapterLevel::kTactical;
  CHECK_THROWS_AS(validate_plan(p, 2), ContractError);
  CHECK_THROWS_AS(validate_plan(two_layer_plan(), 3), ContractError);
  // Structurally legal, but L=2 has an empty operational zone.
  CHECK_NOTHROW(validate_plan(two_layer_plan(), 2));
  CHECK_FALSE(plan_respects_zones(two_layer_plan(), 2));
}

TEST_CASE("AdapterModule: hand-computed residual bottleneck") {
  AdapterModule a;
  a.bottleneck_r = 2;
  Matrix down = Matrix::Zero(4, 2);
  down(0, 0) = 1.0;
  down(1, 1) = 1.0;
  Matrix up = Matrix::Zero(2, 4);
  up(0, 2) = 1.0;
  up(1, 3) = 1.0;
  a.w_down = Tensor(down);
  a.w_up = Tensor(up);
  Matrix h(1, 4);
  h << 1.0, -1.0, 0.0, 0.0;
  const Matrix out = a.apply(Tensor(h)).value();
  CHECK(out(0, 0) == 1.0);
  CHECK(out(0, 1) == -1.0);
  CHECK(std::abs(out(0, 2) - 0.8413447460685429485852325456320379224779) <= 1e-12);
  CHECK(std::abs(out(0, 3) - -0.1586552539314570514147674543679620775221) <= 1e-12);
}

TEST_CASE("insert_adapters: identity at init and freezing") {
  ModelConfig c = toy_config();
  c.n_layers = 3;
  const Model base = build_model(c, 21);
  const Model adapted = insert_adapters(base, default_adapter_plan(c), 2, 5);
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto tokens = random_tokens(rng, 1 + rng.index(16), c.vocab_size);
    CHECK(adapted.forward(tokens).value() == base.forward(tokens).value());
  }
  for (const auto& p : adapted.parameters()) {
    const bool is_adapter = p.name.find(".adapter.") != std::string::npos;
    CHECK(p.trainable == is_adapter);
  }
  // The base model is untouched by insertion.
  for (const auto& p : base.parameters()) CHECK(p.trainable);
  CHECK(adapted.trainable_parameters().size() == 2 * 4);
}

TEST_CASE("insert_adapters: bottleneck must be narrower than d_model") {
  const Model base = build_model(toy_config(), 0);
  CHECK_THROWS_AS(insert_adapters(base, two_layer_plan(), 8), ContractError);
  CHECK_THROWS_AS(insert_adapters(base, two_layer_plan(), 0), ContractError);
  CHECK_NOTHROW(insert_adapters(base, two_layer_plan(), 7));
}

TEST_CASE("count_trainable_fraction") {
  SUBCASE("no adapters") { CHECK(count_trainable_fraction(build_model(toy_config(), 0)) == 0.0); }
  SUBCASE("toy L=3, d=8, r=2 matches hand arithmetic") {
    ModelConfig c = toy_config();
    c.n_layers = 3;
    const Model m = insert_adapters(build_model(c, 0), default_adapter_plan(c), 2);
    // Base: 11*8 + 16*8 + 3*(32 + 256 + 256 + 16 + 8) + 16 = 1936.
    // Adapters: 4 modules * 2 * 8 * 2 = 128.
    CHECK(hand_count(c) == 1936);
    CHECK(count_trainable_fraction(m) == doctest::Approx(128.0 / 2064.0).epsilon(1e-15));
    CHECK(count_parameters(c, default_adapter_plan(c), 2).trainable_fraction() ==
          count_trainable_fraction(m));
  }
  SUBCASE("14B-like configuration with r=64") {
    const ModelConfig big{48, 5120, 40, 13824, 152064, 4096};
    const ParameterCounts counts = count_parameters(big, default_adapter_plan(big), 64);
    CHECK(counts.adapter == 64LL * 2 * 5120 * 64);
    CHECK(counts.trainable_fraction() >= 0.002);
    CHECK(counts.trainable_fraction() <= 0.004);
    CHECK(counts.trainable_fraction() == doctest::Approx(0.0033).epsilon(0.01));
  }
  SUBCASE("monotone in r") {
    const ModelConfig big{48, 5120, 40, 13824, 152064, 4096};
    double prev = 0.0;
    for (int r : {1, 8, 16, 32, 64, 128, 256}) {
      const double f = count_parameters(big, default_adapter_plan(big), r).trainable_fraction();
      CHECK(f > prev);
      prev = f;
    }
  }
}

TEST_CASE("forward: causality") {
  ModelConfig c = toy_config();
  Model m = insert_adapters(build_model(c, 4), two_layer_plan(), 3, 9);
  randomize_adapters(m, 10);
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    auto tokens = random_tokens(rng, 10, c.vocab_size);
    const Matrix before = m.forward(tokens).value();
    const std::size_t t = rng.index(10);
    tokens[t] = static_cast<TokenId>((tokens[t] + 1) % c.vocab_size);
    const Matrix after = m.forward(tokens).value();
    for (std::size_t i = 0; i < t; ++i) {
      CHECK(before.row(static_cast<Index>(i)) == after.row(static_cast<Index>(i)));
    }
    CHECK(before.row(static_cast<Index>(t)) != after.row(static_cast<Index>(t)));
  }
}

TEST_CASE("forward: agrees with straight-line reference implementation") {
  Model m = insert_adapters(build_model(toy_config(), 17), two_layer_plan(), 3, 2);
  randomize_adapters(m, 3);
  const std::vector<TokenId> tokens{3, 0, 7, 7, 10, 1};
  const Matrix logits = m.forward(tokens).value();
  const Grid ref = reference_forward(m, tokens);
  double worst = 0.0;
  for (Index i = 0; i < logits.rows(); ++i)
    for (Index j = 0; j < logits.cols(); ++j) worst = std::max(worst, std::abs(logits(i, j) - ref[i][j]));
  CHECK(worst <= 1e-10);
}

TEST_CASE("forward: input errors") {
  const Model m = build_model(toy_config(), 0);
  const std::vector<TokenId> oov{1, 11};
  CHECK_THROWS_AS(m.forward(oov), InputError);
  const std::vector<TokenId> too_long(17, 1);
  CHECK_THROWS_AS(m.forward(too_long), InputError);
  CHECK_THROWS_AS(m.forward(std::vector<TokenId>{}), InputError);
}

TEST_CASE("checkpoint: bit-exact round trip") {
  Model m = insert_adapters(build_model(toy_config(), 6), two_layer_plan(), 3, 1);
  randomize_adapters(m, 4);
  const std::vector<std::string> vocab{"<unk>", "a", "b"};
  const auto bytes = encode_checkpoint(m, vocab);
  const Checkpoint back = decode_checkpoint(bytes);
  CHECK(back.vocabulary == vocab);
  CHECK(back.model.config() == m.config());
  CHECK(back.model.plan() == m.plan());
  CHECK(back.model.adapter_r() == 3);
  const auto a = m.parameters();
  const auto b = back.model.parameters();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].trainable == b[i].trainable);
    CHECK(a[i].tensor.value() == b[i].tensor.value());
  }
  CHECK(encode_checkpoint(back.model, back.vocabulary) == bytes);

  const auto path = std::filesystem::temp_directory_path() / "hrt_test_ckpt.bin";
  save_checkpoint(path, m, vocab);
  const Checkpoint from_disk = load_checkpoint(path);
  const std::vector<TokenId> tokens{1, 2, 3};
  CHECK(from_disk.model.forward(tokens).value() == m.forward(tokens).value());
  std::filesystem::remove(path);
}

TEST_CASE("checkpoint: corruption is detected") {
  const Model m = build_model(toy_config(), 6);
  auto bytes = encode_checkpoint(m);
  CHECK(bytes[8] == 1);  // version, little-endian
  auto flipped = bytes;
  flipped[100] ^= 0x01;
  CHECK_THROWS_AS(decode_checkpoint(flipped), InputError);
  auto truncated = bytes;
  truncated.resize(bytes.size() / 2);
  CHECK_THROWS_AS(decode_checkpoint(truncated), InputError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/dir/x.ckpt"), IoError);
}
