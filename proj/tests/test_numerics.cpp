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
#include <vector>

#include "doctest.h"
#include "hrt/errors.hpp"
#include "hrt/numerics/gradcheck.hpp"
#include "hrt/numerics/kernels.hpp"
#include "hrt/numerics/ops.hpp"
#include "hrt/random.hpp"

using namespace hrt;

namespace {

Matrix random_matrix(Rng& rng, Index rows, Index cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix c = Matrix::Zero(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.cols(); ++j)
      for (Index k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
  return c;
}

// Softmax first, then log, per row; no max-shift tricks shared with the
// implementation.
double direct_nll(const Matrix& logits, const std::vector<TokenId>& targets,
                  const std::vector<bool>& mask) {
  double total = 0.0;
  int n = 0;
  for (Index t = 0; t < logits.rows(); ++t) {
    if (!mask[static_cast<std::size_t>(t)]) continue;
    double z = 0.0;
    for (Index v = 0; v < logits.cols(); ++v) z += std::exp(logits(t, v));
    total -= std::log(std::exp(logits(t, targets[static_cast<std::size_t>(t)])) / z);
    ++n;
  }
  return total / n;
}

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

void expect_gradcheck(const std::function<Tensor()>& fn, const std::vector<Tensor>& params) {
  const GradCheckReport report = check_gradients(fn, params);
  INFO(report.summary());
  CHECK(report.passed());
  CHECK(report.checked > 0);
}

}  // namespace

TEST_CASE("matmul: hand-computed cases") {
  const Tensor eye(from_rows({{1, 0}, {0, 1}}));
  const Tensor b(from_rows({{3, 4}, {5, 6}}));
  CHECK(matmul(eye, b).value() == b.value());

  const Tensor row(from_rows({{1, 2}}));
  const Tensor col(from_rows({{3}, {4}}));
  CHECK(matmul(row, col).item() == 11.0);
}

TEST_CASE("matmul: agrees with triple-loop oracle") {
  Rng rng(7);
  {
    const Matrix a = random_matrix(rng, 5, 7);
    const Matrix b = random_matrix(rng, 7, 3);
    CHECK((matmul(Tensor(a), Tensor(b)).value() - naive_matmul(a, b)).cwiseAbs().maxCoeff() <=
          1e-12);
  }
  for (int trial = 0; trial < 50; ++trial) {
    const Index m = 1 + static_cast<Index>(rng.index(32));
    const Index k = 1 + static_cast<Index>(rng.index(32));
    const Index n = 1 + static_cast<Index>(rng.index(32));
    const Matrix a = random_matrix(rng, m, k);
    const Matrix b = random_matrix(rng, k, n);
    CHECK((matmul(Tensor(a), Tensor(b)).value() - naive_matmul(a, b)).cwiseAbs().maxCoeff() <=
          1e-12);
  }
}

TEST_CASE("matmul: shape mismatch names both shapes") {
  const Tensor a(Matrix::Ones(2, 3));
  const Tensor b(Matrix::Ones(4, 5));
  try {
    (void)matmul(a, b);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[2x3]") != std::string::npos);
    CHECK(msg.find("[4x5]") != std::string::npos);
  }
}

TEST_CASE("gelu: reference values") {
  auto at = [](double x) { return gelu(Tensor::scalar(x)).item(); };
  CHECK(at(0.0) == 0.0);
  CHECK(std::abs(at(10.0) - 10.0) <= 1e-6);
  // 40-digit erf evaluations, frozen.
  CHECK(std::abs(at(1.0) - 0.8413447460685429485852325456320379224779) <= 1e-12);
  CHECK(std::abs(at(-1.0) - -0.1586552539314570514147674543679620775221) <= 1e-12);
  CHECK(std::abs(at(0.5) - 0.3457312306370065518188523053041688699418) <= 1e-12);
}

TEST_CASE("cross_entropy_nll: limits and oracle") {
  SUBCASE("certainty limit") {
    Matrix logits = Matrix::Zero(3, 4);
    const std::vector<TokenId> targets{2, 0, 3};
    for (Index t = 0; t < 3; ++t) logits(t, targets[static_cast<std::size_t>(t)]) = 1e6;
    CHECK(cross_entropy_nll(Tensor(logits), targets, {true, true, true}).item() ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("uniform over four classes") {
    const std::vector<TokenId> targets{1, 3};
    CHECK(std::abs(cross_entropy_nll(Tensor(Matrix::Zero(2, 4)), targets, {true, true}).item() -
                   1.3862943611198906) <= 1e-12);
  }
  SUBCASE("random logits against direct softmax") {
    Rng rng(11);
    const Matrix logits = random_matrix(rng, 3, 5, 2.0);
    const std::vector<TokenId> targets{4, 0, 2};
    const std::vector<bool> mask{true, false, true};
    CHECK(std::abs(cross_entropy_nll(Tensor(logits), targets, mask).item() -
                   direct_nll(logits, targets, mask)) <= 1e-12);
  }
  SUBCASE("masked positions ignore out-of-range targets") {
    const std::vector<TokenId> targets{1, 99};
    CHECK_NOTHROW(cross_entropy_nll(Tensor(Matrix::Zero(2, 4)), targets, {true, false}));
    CHECK_THROWS_AS(cross_entropy_nll(Tensor(Matrix::Zero(2, 4)), targets, {true, true}),
                    InputError);
  }
  SUBCASE("all-masked is an explicit error") {
    const std::vector<TokenId> targets{1, 2};
    CHECK_THROWS_AS(cross_entropy_nll(Tensor(Matrix::Zero(2, 4)), targets, {false, false}),
                    EmptyMaskError);
  }
}

TEST_CASE("backward: closed forms") {
  SUBCASE("linear") {
    Tensor w(Matrix::Constant(2, 3, 0.7), true);
    backward(sum(w));
    CHECK(w.grad() == Matrix::Ones(2, 3));
  }
  SUBCASE("quadratic") {
    Tensor w(from_rows({{1, 2, 3}}), true);
    backward(sum(mul(w, w)));
    CHECK(w.grad() == from_rows({{2, 4, 6}}));
  }
  SUBCASE("two consumers accumulate") {
    // loss = sum(w*w) + sum(3w)  =>  dloss/dw = 2w + 3
    Tensor w(from_rows({{1, -2}, {0.5, 4}}), true);
    backward(add(sum(mul(w, w)), sum(scale(w, 3.0))));
    CHECK(w.grad() == from_rows({{5, -1}, {4, 11}}));
  }
  SUBCASE("same tensor on both sides of an op") {
    Tensor w(from_rows({{1, 2}}), true);
    backward(sum(add(w, w)));
    CHECK(w.grad() == from_rows({{2, 2}}));
  }
  SUBCASE("non-scalar loss is rejected") {
    Tensor w(Matrix::Ones(2, 2), true);
    CHECK_THROWS_AS(backward(w), ContractError);
  }
  SUBCASE("loss without trainable inputs is rejected") {
    CHECK_THROWS_AS(backward(sum(Tensor(Matrix::Ones(2, 2)))), ContractError);
  }
}

TEST_CASE("backward visits each node once") {
  Tensor w(Matrix::Constant(1, 3, 0.3), true);
  const Tensor g = gelu(w);
  const Tensor loss = sum(add(g, g));  // nodes: loss, add, gelu, w
  const BackwardStats stats = backward(loss);
  CHECK(stats.nodes_visited == 4);
  CHECK(stats.leaves_reached == 1);
  Matrix expected = Matrix(kernels::gelu_derivative(w.value())) * 2.0;
  CHECK((w.grad() - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("backward twice on the same graph accumulates exactly twice") {
  Tensor w(from_rows({{1, 2, 3}}), true);
  const Tensor loss = sum(mul(gelu(w), w));
  backward(loss);
  const Matrix once = w.grad();
  backward(loss);
  CHECK(w.grad() == Matrix(2.0 * once));
}

TEST_CASE("stale gradients are a contract violation") {
  Tensor w(Matrix::Ones(1, 2), true);
  backward(sum(w));
  w.mark_stale();  // what an optimizer step does
  CHECK_THROWS_AS(backward(sum(w)), ContractError);
  w.zero_grad();
  CHECK_NOTHROW(backward(sum(w)));
}

TEST_CASE("finite-difference agreement for every differentiable op") {
  Rng rng(2024);
  Tensor a(random_matrix(rng, 3, 4), true);
  Tensor b(random_matrix(rng, 4, 2), true);
  Tensor sq(random_matrix(rng, 4, 4), true);
  Tensor row(random_matrix(rng, 1, 4), true);
  Tensor gain(random_matrix(rng, 1, 4, 0.5), true);
  Tensor table(random_matrix(rng, 6, 3), true);
  Tensor weights(random_matrix(rng, 3, 4), true);  // fixed mixing for non-scalar ops
  auto probe = [&](const Tensor& t) {
    Matrix w = Matrix::Zero(t.rows(), t.cols());
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = std::sin(1.0 + 0.37 * static_cast<double>(i));
    return sum(mul(t, Tensor(w)));
  };

  SUBCASE("matmul") { expect_gradcheck([&] { return probe(matmul(a, b)); }, {a, b}); }
  SUBCASE("transpose") { expect_gradcheck([&] { return probe(transpose(a)); }, {a}); }
  SUBCASE("add / mul / scale") {
    expect_gradcheck([&] { return probe(scale(mul(add(a, weights), a), -1.5)); }, {a, weights});
  }
  SUBCASE("add_row") { expect_gradcheck([&] { return probe(add_row(a, row)); }, {a, row}); }
  SUBCASE("gelu") { expect_gradcheck([&] { return probe(gelu(a)); }, {a}); }
  SUBCASE("layer_norm") {
    expect_gradcheck([&] { return probe(layer_norm(a, gain, row)); }, {a, gain, row});
  }
  SUBCASE("embedding with repeated ids") {
    const std::vector<TokenId> ids{2, 5, 2, 0};
    expect_gradcheck([&] { return probe(embedding(table, ids)); }, {table});
  }
  SUBCASE("take_rows / slice_cols / concat_cols") {
    expect_gradcheck(
        [&] {
          return probe(concat_cols({slice_cols(a, 1, 2), take_rows(sq, 3), slice_cols(a, 0, 1)}));
        },
        {a, sq});
  }
  SUBCASE("causal_softmax") { expect_gradcheck([&] { return probe(causal_softmax(sq)); }, {sq}); }
  SUBCASE("cross_entropy_nll") {
    const std::vector<TokenId> targets{3, 1, 0};
    expect_gradcheck([&] { return cross_entropy_nll(a, targets, {true, false, true}); }, {a});
  }
}

TEST_CASE("causal_softmax never looks ahead") {
  Rng rng(5);
  const Matrix s = random_matrix(rng, 5, 5);
  const Matrix p = causal_softmax(Tensor(s)).value();
  for (Index i = 0; i < 5; ++i) {
    CHECK(std::abs(p.row(i).sum() - 1.0) <= 1e-12);
    for (Index j = i + 1; j < 5; ++j) CHECK(p(i, j) == 0.0);
  }
}

TEST_CASE("forward and backward are bit-identical across repeats") {
  auto run = [] {
    Rng rng(99);
    Tensor x(random_matrix(rng, 4, 4), true);
    Tensor g(random_matrix(rng, 1, 4), true);
    Tensor beta(random_matrix(rng, 1, 4), true);
    const Tensor out = causal_softmax(layer_norm(gelu(matmul(x, transpose(x))), g, beta));
    const std::vector<TokenId> targets{0, 1, 2, 3};
    const Tensor loss = cross_entropy_nll(out, targets, {true, true, true, true});
    backward(loss);
    return std::make_pair(loss.item(), x.grad());
  };
  const auto first = run();
  const auto second = run();
  CHECK(first.first == second.first);
  CHECK(first.second == second.second);
  CHECK(first.second.allFinite());
}

TEST_CASE("tensor invariants") {
  CHECK_THROWS_AS(Tensor(Matrix(0, 3)), DimensionError);
  Tensor t(Matrix::Ones(2, 3), true);
  CHECK(t.shape() == std::array<Index, 2>{2, 3});
  CHECK(t.grad().rows() == 2);
  CHECK_FALSE(t.has_grad());
  const Tensor c = t.clone();
  CHECK_FALSE(c.same_storage(t));
  CHECK(c.value() == t.value());
}
